/**
 * Explorer entry point: a draggable/resizable target on a phone-frame
 * canvas, live predictions from the service, per-axis distribution plots
 * and a numeric readout panel. All numbers shown come straight from the
 * service response.
 */

import { debounce, PredictClient, requestForRect } from './api.js';
import type { PredictResponse } from './api.js';
import { drawAxisDistribution } from './charts.js';
import { clampRect, DEFAULT_FRAME, deriveLayout } from './geometry.js';
import type { Frame, Rect } from './geometry.js';
import { panelModel } from './panel.js';

const PX_PER_MM = 5;
const HANDLE_PX = 10;

const frame: Frame = DEFAULT_FRAME;
let rect: Rect = clampRect({ x: 3.0, y: 60.0, w: 7.0, h: 7.0 }, frame);
let preset = 'exp1';
let lastResponse: PredictResponse | null = null;
let stale = false;

const client = new PredictClient('');

const frameCanvas = document.getElementById('frame') as HTMLCanvasElement;
const chartX = document.getElementById('chart-x') as HTMLCanvasElement;
const chartY = document.getElementById('chart-y') as HTMLCanvasElement;
const presetSelect = document.getElementById('preset') as HTMLSelectElement;
const banner = document.getElementById('banner') as HTMLDivElement;
const panelEl = document.getElementById('panel') as HTMLDivElement;

frameCanvas.width = Math.round(frame.width * PX_PER_MM);
frameCanvas.height = Math.round(frame.height * PX_PER_MM);

function toPx(mm: number): number {
	return mm * PX_PER_MM;
}

/** Shade the edge-adjacent strips where the skew regime is active. */
function drawThresholdBands(ctx: CanvasRenderingContext2D, resp: PredictResponse) {
	ctx.save();
	ctx.fillStyle = 'rgba(255, 167, 38, 0.18)';
	const bandX = toPx(resp.x.threshold);
	const bandY = toPx(resp.y.threshold);
	ctx.fillRect(0, 0, bandX, frameCanvas.height);
	ctx.fillRect(frameCanvas.width - bandX, 0, bandX, frameCanvas.height);
	ctx.fillRect(0, 0, frameCanvas.width, bandY);
	ctx.fillRect(0, frameCanvas.height - bandY, frameCanvas.width, bandY);
	ctx.restore();
}

function drawFrame() {
	const ctx = frameCanvas.getContext('2d');
	if (!ctx) return;
	ctx.clearRect(0, 0, frameCanvas.width, frameCanvas.height);
	ctx.fillStyle = '#fafafa';
	ctx.fillRect(0, 0, frameCanvas.width, frameCanvas.height);
	if (lastResponse) drawThresholdBands(ctx, lastResponse);
	ctx.strokeStyle = '#212121';
	ctx.lineWidth = 2;
	ctx.strokeRect(0, 0, frameCanvas.width, frameCanvas.height);

	ctx.fillStyle = stale ? 'rgba(21, 101, 192, 0.35)' : 'rgba(21, 101, 192, 0.65)';
	ctx.fillRect(toPx(rect.x), toPx(rect.y), toPx(rect.w), toPx(rect.h));
	ctx.strokeStyle = '#0d47a1';
	ctx.lineWidth = 1;
	ctx.strokeRect(toPx(rect.x), toPx(rect.y), toPx(rect.w), toPx(rect.h));
	// resize handle, bottom-right corner
	ctx.fillStyle = '#0d47a1';
	ctx.fillRect(toPx(rect.x + rect.w) - HANDLE_PX, toPx(rect.y + rect.h) - HANDLE_PX,
		HANDLE_PX, HANDLE_PX);
}

function renderPanel() {
	if (!lastResponse) {
		panelEl.innerHTML = '<p class="muted">Drag the target to get a prediction.</p>';
		return;
	}
	const m = panelModel(lastResponse);
	const reverted = lastResponse.x.gamma1 === 0 && lastResponse.y.gamma1 === 0;
	const row = (label: string, value: string, id: string) =>
		`<tr><td>${label}</td><td id="${id}">${value}</td></tr>`;
	panelEl.innerHTML = `
		<table>
			${row('Success rate', m.sr, 'sr')}
			${row('SR (x axis)', m.srX, 'sr-x')}
			${row('SR (y axis)', m.srY, 'sr-y')}
			${row('Baseline SR', m.baselineSr, 'baseline-sr')}
			${row('Skewness x / y', `${m.gamma1X} / ${m.gamma1Y}`, 'gamma1')}
			${row('Mean shift x / y (mm)', `${m.muX} / ${m.muY}`, 'mu')}
			${row('Variance x / y (mm²)', `${m.sigma2X} / ${m.sigma2Y}`, 'sigma2')}
			${row('Skew-region depth x / y (mm)', `${m.thresholdX} / ${m.thresholdY}`, 'threshold')}
		</table>
		${reverted ? '<p class="badge" id="reverted">No edge effect: normal model</p>' : ''}
	`;
}

function renderCharts() {
	drawAxisDistribution(chartX, lastResponse?.x.curve, rect.w, 'x-axis tap distribution');
	drawAxisDistribution(chartY, lastResponse?.y.curve, rect.h, 'y-axis tap distribution');
}

function render() {
	banner.hidden = !stale;
	drawFrame();
	renderPanel();
	renderCharts();
}

async function refresh() {
	try {
		const resp = await client.predict(requestForRect(rect, frame, preset));
		if (resp === null) return; // superseded by a newer drag position
		lastResponse = resp;
		stale = false;
	} catch {
		stale = true; // keep showing the last good values
	}
	render();
}

const refreshSoon = debounce(refresh, 60);

// --- pointer interaction ------------------------------------------------

type DragMode = 'move' | 'resize' | null;
let dragMode: DragMode = null;
let dragOffset = { x: 0, y: 0 };

function eventMm(ev: PointerEvent): { x: number; y: number } {
	const bounds = frameCanvas.getBoundingClientRect();
	return {
		x: (ev.clientX - bounds.left) / PX_PER_MM,
		y: (ev.clientY - bounds.top) / PX_PER_MM,
	};
}

frameCanvas.addEventListener('pointerdown', (ev) => {
	const p = eventMm(ev);
	const handleMm = HANDLE_PX / PX_PER_MM;
	const nearCorner =
		Math.abs(p.x - (rect.x + rect.w)) <= handleMm &&
		Math.abs(p.y - (rect.y + rect.h)) <= handleMm;
	const inside = p.x >= rect.x && p.x <= rect.x + rect.w &&
		p.y >= rect.y && p.y <= rect.y + rect.h;
	if (nearCorner) dragMode = 'resize';
	else if (inside) dragMode = 'move';
	else return;
	dragOffset = { x: p.x - rect.x, y: p.y - rect.y };
	frameCanvas.setPointerCapture(ev.pointerId);
});

frameCanvas.addEventListener('pointermove', (ev) => {
	if (!dragMode) return;
	const p = eventMm(ev);
	if (dragMode === 'move') {
		rect = clampRect({ ...rect, x: p.x - dragOffset.x, y: p.y - dragOffset.y }, frame);
	} else {
		rect = clampRect({ ...rect, w: p.x - rect.x, h: p.y - rect.y }, frame);
	}
	drawFrame();
	refreshSoon();
});

frameCanvas.addEventListener('pointerup', (ev) => {
	dragMode = null;
	frameCanvas.releasePointerCapture(ev.pointerId);
	refreshSoon();
});

presetSelect.addEventListener('change', () => {
	preset = presetSelect.value;
	refreshSoon();
});

// --- startup ------------------------------------------------------------

async function start() {
	try {
		const infos = await client.presets();
		presetSelect.innerHTML = infos
			.map((p) => `<option value="${p.name}">${p.name} — ${p.source}</option>`)
			.join('');
		presetSelect.value = preset;
	} catch {
		presetSelect.innerHTML = `<option value="exp1">exp1</option>`;
	}
	render();
	await refresh();
}

void start();

// Show the derived layout in the window title for quick inspection.
setInterval(() => {
	const layout = deriveLayout(rect, frame);
	document.title =
		`edgetap — mx ${layout.x.margin.toFixed(1)} my ${layout.y.margin.toFixed(1)}`;
}, 500);
