/**
 * Typed client for the prediction service. All units are millimetres and
 * field names mirror the JSON API. The client keeps at most one predict
 * request in flight; newer requests abort older ones (newest wins).
 */

import type { EdgeSide, Frame, LayoutDerivation, Rect } from './geometry.js';
import { deriveLayout } from './geometry.js';

export interface PresetInfo {
	name: string;
	source: string;
}

export interface PredictRequest {
	w: number;
	h: number;
	margin_x: number;
	margin_y: number;
	edge_x: EdgeSide;
	edge_y: EdgeSide;
	preset: string;
	curve_points?: number;
	baseline?: boolean;
}

export interface AxisCurve {
	positions: number[];
	density: number[];
	baseline_density?: number[];
}

export interface AxisPrediction {
	sr: number;
	gamma1: number;
	sigma2: number;
	mu: number;
	xi: number;
	omega: number;
	alpha: number;
	d_edge: number;
	threshold: number;
	curve?: AxisCurve;
}

export interface PredictResponse {
	sr: number;
	sr_x: number;
	sr_y: number;
	baseline_sr?: number;
	x: AxisPrediction;
	y: AxisPrediction;
}

export function requestForRect(
	rect: Rect, frame: Frame, preset: string, curvePoints = 200,
): PredictRequest {
	const layout: LayoutDerivation = deriveLayout(rect, frame);
	return {
		w: rect.w,
		h: rect.h,
		margin_x: layout.x.margin,
		margin_y: layout.y.margin,
		edge_x: layout.x.edge,
		edge_y: layout.y.edge,
		preset,
		curve_points: curvePoints,
		baseline: true,
	};
}

export class ApiError extends Error {
	constructor(message: string, readonly status: number) {
		super(message);
	}
}

export class PredictClient {
	private inflight: AbortController | null = null;

	constructor(private readonly baseUrl: string = '') {}

	async presets(): Promise<PresetInfo[]> {
		const resp = await fetch(`${this.baseUrl}/presets`);
		if (!resp.ok) throw new ApiError(`presets failed`, resp.status);
		return resp.json();
	}

	/**
	 * POST /predict with newest-wins cancellation. Returns null when this
	 * request was superseded before completing; throws on service failure.
	 */
	async predict(req: PredictRequest): Promise<PredictResponse | null> {
		this.inflight?.abort();
		const controller = new AbortController();
		this.inflight = controller;
		try {
			const resp = await fetch(`${this.baseUrl}/predict`, {
				method: 'POST',
				headers: { 'Content-Type': 'application/json' },
				body: JSON.stringify(req),
				signal: controller.signal,
			});
			if (!resp.ok) {
				throw new ApiError(await resp.text(), resp.status);
			}
			return await resp.json();
		} catch (err) {
			if (controller.signal.aborted) return null;
			throw err;
		} finally {
			if (this.inflight === controller) this.inflight = null;
		}
	}
}

/** Trailing-edge debounce used for drag interaction (default 60 ms). */
export function debounce<A extends unknown[]>(
	fn: (...args: A) => void, delayMs = 60,
): (...args: A) => void {
	let timer: ReturnType<typeof setTimeout> | undefined;
	return (...args: A) => {
		if (timer !== undefined) clearTimeout(timer);
		timer = setTimeout(() => fn(...args), delayMs);
	};
}
