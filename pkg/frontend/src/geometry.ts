/**
 * Device frame and target-rectangle geometry, all in millimetres.
 *
 * The frame uses screen coordinates (origin top-left, y growing downward).
 * Per axis, the nearest screen edge determines the request's edge side:
 * the left/bottom edges are the "neg" side of the model's axis frame, the
 * right/top edges the "pos" side. Equidistant ties resolve to "none" so
 * the prediction degrades to the no-edge baseline.
 */

export type EdgeSide = 'neg' | 'pos' | 'none';

export interface Frame {
	/** display width in mm */
	width: number;
	/** display height in mm */
	height: number;
}

/** Pixel 6a display, the device the shipped presets were measured on. */
export const DEFAULT_FRAME: Frame = { width: 64.1, height: 142.5 };

export interface Rect {
	/** left edge, mm from the frame's left */
	x: number;
	/** top edge, mm from the frame's top */
	y: number;
	w: number;
	h: number;
}

export interface AxisDerivation {
	margin: number;
	edge: EdgeSide;
}

export interface LayoutDerivation {
	x: AxisDerivation;
	y: AxisDerivation;
}

/** Nearest-edge rule along one axis given the two boundary gaps. */
export function deriveAxis(gapNegSide: number, gapPosSide: number): AxisDerivation {
	if (gapNegSide === gapPosSide) {
		return { margin: gapNegSide, edge: 'none' };
	}
	return gapNegSide < gapPosSide
		? { margin: gapNegSide, edge: 'neg' }
		: { margin: gapPosSide, edge: 'pos' };
}

/**
 * Margins and edge sides for a target rectangle inside the frame.
 * Horizontally the left edge is the neg side; vertically the bottom edge
 * (larger screen y) is the neg side, matching the model's upward y axis.
 */
export function deriveLayout(rect: Rect, frame: Frame): LayoutDerivation {
	const left = rect.x;
	const right = frame.width - (rect.x + rect.w);
	const bottom = frame.height - (rect.y + rect.h);
	const top = rect.y;
	return { x: deriveAxis(left, right), y: deriveAxis(bottom, top) };
}

/** Keep the rect fully inside the frame, clamping position then size. */
export function clampRect(rect: Rect, frame: Frame, minSize = 1.0): Rect {
	const w = Math.min(Math.max(rect.w, minSize), frame.width);
	const h = Math.min(Math.max(rect.h, minSize), frame.height);
	const x = Math.min(Math.max(rect.x, 0), frame.width - w);
	const y = Math.min(Math.max(rect.y, 0), frame.height - h);
	return { x, y, w, h };
}

/** Shared placements exercised by both the unit tests and the live checks. */
export function scriptedPlacements(frame: Frame): Rect[] {
	const sizes = [1.56, 3.119, 4.679, 7.798];
	const margins = [0, 1.56, 3.119, 7.798, 20];
	const rects: Rect[] = [];
	for (const s of sizes) {
		for (const m of margins) {
			// hugging the left edge at varying margins, vertically centered
			rects.push(clampRect(
				{ x: m, y: (frame.height - s) / 2, w: s, h: s }, frame));
		}
	}
	return rects;
}
