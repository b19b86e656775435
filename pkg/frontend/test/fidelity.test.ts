/**
 * Live checks against the real service (spawned by the global setup):
 * everything the explorer displays must equal the service response to the
 * display precision, and the qualitative edge behaviour must hold.
 */

import { beforeAll, describe, expect, it } from 'vitest';

import { PredictClient, requestForRect } from '../src/api.js';
import type { PredictResponse } from '../src/api.js';
import { DEFAULT_FRAME, scriptedPlacements } from '../src/geometry.js';
import { fmtSr, panelModel } from '../src/panel.js';
import { BASE_URL } from './setup-service.js';

const client = new PredictClient(BASE_URL);

describe('service endpoints', () => {
	it('lists the shipped presets', async () => {
		const names = (await client.presets()).map((p) => p.name);
		expect(names).toContain('exp1');
		expect(names).toContain('exp2');
		expect(names).toContain('exp3');
	});
});

describe('display fidelity', () => {
	const placements = scriptedPlacements(DEFAULT_FRAME);
	const responses: PredictResponse[] = [];

	beforeAll(async () => {
		for (const rect of placements) {
			const resp = await client.predict(
				requestForRect(rect, DEFAULT_FRAME, 'exp1'));
			expect(resp).not.toBeNull();
			responses.push(resp!);
		}
	});

	it('shows every SR exactly as the service reported it', () => {
		expect(responses).toHaveLength(20);
		for (const resp of responses) {
			const m = panelModel(resp);
			expect(m.sr).toBe(fmtSr(resp.sr));
			expect(m.srX).toBe(fmtSr(resp.sr_x));
			expect(m.srY).toBe(fmtSr(resp.sr_y));
			expect(m.baselineSr).toBe(fmtSr(resp.baseline_sr!));
			expect(m.sr).toMatch(/^0\.\d{4}$|^1\.0000$/);
		}
	});

	it('every panel field round-trips from the response without model math', () => {
		for (const resp of responses) {
			const m = panelModel(resp);
			expect(Number(m.gamma1X)).toBeCloseTo(resp.x.gamma1, 3);
			expect(Number(m.sigma2X)).toBeCloseTo(resp.x.sigma2, 3);
			expect(Number(m.thresholdX)).toBeCloseTo(resp.x.threshold, 3);
		}
	});
});

describe('edge behaviour', () => {
	it('moving a small target from margin 3 to the edge raises SR', async () => {
		const size = 3.119;
		const y = (DEFAULT_FRAME.height - size) / 2;
		const at3 = await client.predict(requestForRect(
			{ x: 3.0, y, w: size, h: size }, DEFAULT_FRAME, 'exp1'));
		const at0 = await client.predict(requestForRect(
			{ x: 0.0, y, w: size, h: size }, DEFAULT_FRAME, 'exp1'));
		expect(at3).not.toBeNull();
		expect(at0).not.toBeNull();
		expect(at0!.sr).toBeGreaterThan(at3!.sr);
		expect(fmtSr(at0!.sr) > fmtSr(at3!.sr)).toBe(true);
	});

	it('centered target reverts to the symmetric model', async () => {
		const size = 8;
		const resp = await client.predict(requestForRect(
			{
				x: (DEFAULT_FRAME.width - size) / 2,
				y: (DEFAULT_FRAME.height - size) / 2,
				w: size, h: size,
			},
			DEFAULT_FRAME, 'exp1'));
		expect(resp).not.toBeNull();
		for (const axis of [resp!.x, resp!.y]) {
			expect(axis.gamma1).toBe(0);
			expect(axis.alpha).toBe(0);
			expect(axis.mu).toBe(0);
			const curve = axis.curve!;
			expect(curve.baseline_density).toBeDefined();
			// Both curves are centered normals with near-identical variance,
			// so they should visually coincide: pointwise within a few
			// percent of the peak, and symmetric about zero.
			const peak = Math.max(...curve.density);
			for (let i = 0; i < curve.positions.length; i++) {
				expect(Math.abs(curve.density[i] - curve.baseline_density![i]))
					.toBeLessThan(0.05 * peak);
				const j = curve.positions.length - 1 - i;
				expect(curve.density[i]).toBeCloseTo(curve.density[j], 8);
			}
		}
	});
});

describe('client cancellation', () => {
	it('resolves a superseded request to null and the newest to data', async () => {
		const rects = scriptedPlacements(DEFAULT_FRAME).slice(0, 3);
		const results = await Promise.all(rects.map((rect) =>
			client.predict(requestForRect(rect, DEFAULT_FRAME, 'exp1'))));
		expect(results[results.length - 1]).not.toBeNull();
		expect(results.slice(0, -1).every((r) => r === null)).toBe(true);
	});
});
