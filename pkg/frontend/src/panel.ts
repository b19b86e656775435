/**
 * Pure view-model for the readout panel: every displayed string is a
 * direct formatting of a service response field, never a recomputation.
 */

import type { PredictResponse } from './api.js';

export function fmtSr(v: number): string {
	return v.toFixed(4);
}

export function fmtNum(v: number): string {
	return v.toPrecision(4);
}

export interface PanelModel {
	sr: string;
	srX: string;
	srY: string;
	baselineSr: string;
	gamma1X: string;
	gamma1Y: string;
	muX: string;
	muY: string;
	sigma2X: string;
	sigma2Y: string;
	thresholdX: string;
	thresholdY: string;
}

export function panelModel(resp: PredictResponse): PanelModel {
	return {
		sr: fmtSr(resp.sr),
		srX: fmtSr(resp.sr_x),
		srY: fmtSr(resp.sr_y),
		baselineSr: resp.baseline_sr === undefined ? '-' : fmtSr(resp.baseline_sr),
		gamma1X: fmtNum(resp.x.gamma1),
		gamma1Y: fmtNum(resp.y.gamma1),
		muX: fmtNum(resp.x.mu),
		muY: fmtNum(resp.y.mu),
		sigma2X: fmtNum(resp.x.sigma2),
		sigma2Y: fmtNum(resp.y.sigma2),
		thresholdX: fmtNum(resp.x.threshold),
		thresholdY: fmtNum(resp.y.threshold),
	};
}
