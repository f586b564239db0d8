/**
 * Gesture pad: a drag vector picks a class, drag length picks intensity.
 *
 * Six sector centers per bank (translate / rotate), nearest center wins.
 * Right maps to XP and up to ZP; the y axis and the rotations live on the
 * remaining sectors, all spelled out by the on-screen legend.
 */

import { UiGestureKind } from "./protocol.js";

export type PadMode = "translate" | "rotate";

export interface PadGesture {
  kind: UiGestureKind;
  intensity: number;
}

export const DEAD_ZONE_PX = 12;
export const INTENSITY_MIN = 0.5;
export const INTENSITY_MAX = 1.5;

interface Sector {
  angleDeg: number; // 0 = right, 90 = up
  kind: UiGestureKind;
}

const BANKS: Record<PadMode, Sector[]> = {
  translate: [
    { angleDeg: 0, kind: "XP" },
    { angleDeg: 45, kind: "YP" },
    { angleDeg: 90, kind: "ZP" },
    { angleDeg: 180, kind: "XN" },
    { angleDeg: 225, kind: "YN" },
    { angleDeg: 270, kind: "ZN" },
  ],
  rotate: [
    { angleDeg: 0, kind: "RXP" },
    { angleDeg: 45, kind: "RYP" },
    { angleDeg: 90, kind: "RZP" },
    { angleDeg: 180, kind: "RXN" },
    { angleDeg: 225, kind: "RYN" },
    { angleDeg: 270, kind: "RZN" },
  ],
};

export function legendEntries(mode: PadMode): readonly Sector[] {
  return BANKS[mode];
}

function circularDistance(a: number, b: number): number {
  const d = Math.abs(a - b) % 360;
  return d > 180 ? 360 - d : d;
}

/**
 * Map a drag in canvas pixels (dy positive downward) to a gesture.
 * Returns null inside the dead zone.
 */
export function dragToGesture(
  dx: number,
  dy: number,
  mode: PadMode,
  padRadius: number,
): PadGesture | null {
  const dist = Math.hypot(dx, dy);
  if (dist < DEAD_ZONE_PX) return null;
  let angle = (Math.atan2(-dy, dx) * 180) / Math.PI;
  if (angle < 0) angle += 360;
  let best = BANKS[mode][0];
  let bestD = Infinity;
  for (const sector of BANKS[mode]) {
    const d = circularDistance(angle, sector.angleDeg);
    if (d < bestD) {
      bestD = d;
      best = sector;
    }
  }
  const intensity = Math.min(
    INTENSITY_MAX,
    Math.max(INTENSITY_MIN, INTENSITY_MIN + dist / padRadius),
  );
  return { kind: best.kind, intensity };
}
