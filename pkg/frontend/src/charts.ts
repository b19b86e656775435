/**
 * Canvas rendering of the per-axis tap-coordinate distribution plots:
 * predicted skew curve, Gaussian baseline overlay, and target bounds.
 * Pure view code — only response data is drawn, nothing is recomputed.
 */

import type { AxisCurve } from './api.js';

const CURVE_COLOR = '#1565c0';
const BASELINE_COLOR = '#9e9e9e';
const BOUND_COLOR = '#c62828';

export function drawAxisDistribution(
	canvas: HTMLCanvasElement,
	curve: AxisCurve | undefined,
	targetSize: number,
	label: string,
): void {
	const ctx = canvas.getContext('2d');
	if (!ctx) return;
	ctx.clearRect(0, 0, canvas.width, canvas.height);
	if (!curve || curve.positions.length === 0) return;

	const pad = 26;
	const plotW = canvas.width - 2 * pad;
	const plotH = canvas.height - 2 * pad;
	const xMin = curve.positions[0];
	const xMax = curve.positions[curve.positions.length - 1];
	const yMax = Math.max(
		...curve.density, ...(curve.baseline_density ?? [0]), 1e-12);
	const toPx = (x: number) => pad + ((x - xMin) / (xMax - xMin)) * plotW;
	const toPy = (y: number) => canvas.height - pad - (y / yMax) * plotH;

	const polyline = (ys: number[], color: string, dashed: boolean) => {
		ctx.save();
		ctx.strokeStyle = color;
		ctx.lineWidth = 1.5;
		if (dashed) ctx.setLineDash([5, 4]);
		ctx.beginPath();
		curve.positions.forEach((x, i) => {
			if (i === 0) ctx.moveTo(toPx(x), toPy(ys[i]));
			else ctx.lineTo(toPx(x), toPy(ys[i]));
		});
		ctx.stroke();
		ctx.restore();
	};

	if (curve.baseline_density) polyline(curve.baseline_density, BASELINE_COLOR, true);
	polyline(curve.density, CURVE_COLOR, false);

	// target bounds at +- size/2
	ctx.save();
	ctx.strokeStyle = BOUND_COLOR;
	ctx.setLineDash([2, 3]);
	for (const b of [-targetSize / 2, targetSize / 2]) {
		if (b < xMin || b > xMax) continue;
		ctx.beginPath();
		ctx.moveTo(toPx(b), pad);
		ctx.lineTo(toPx(b), canvas.height - pad);
		ctx.stroke();
	}
	ctx.restore();

	ctx.fillStyle = '#424242';
	ctx.font = '11px sans-serif';
	ctx.fillText(label, pad, 14);
	ctx.fillText(`${xMin.toFixed(1)} mm`, pad, canvas.height - 8);
	const maxLabel = `${xMax.toFixed(1)} mm`;
	ctx.fillText(maxLabel, canvas.width - pad - ctx.measureText(maxLabel).width,
		canvas.height - 8);
}
