// @vitest-environment jsdom

import { readFileSync } from 'node:fs';
import { join } from 'node:path';

import { beforeEach, describe, expect, it } from 'vitest';

import { bindElements, render } from '../src/render.js';

const indexHtml = readFileSync(join(process.cwd(), 'index.html'), 'utf8');

function pageBody(): string {
	return indexHtml.split('<body>')[1].split('</body>')[0];
}

beforeEach(() => {
	document.body.innerHTML = pageBody();
});

describe('render', () => {
	it('binds every element in the shipped page', () => {
		expect(() => bindElements(document)).not.toThrow();
	});

	it('gives a DD verdict warning styling with the confidence percentage', () => {
		const els = bindElements(document);
		render(els, { phase: 'done', verdict: { label: 'DD', confidence: 0.87 } });
		expect(els.verdictCard.hidden).toBe(false);
		expect(els.verdictCard.classList.contains('dd')).toBe(true);
		expect(els.verdictCard.classList.contains('ndd')).toBe(false);
		expect(els.verdictLabel.textContent).toBe('DD');
		expect(els.verdictConfidence.textContent).toContain('87.0%');
	});

	it('gives an NDD verdict neutral styling', () => {
		const els = bindElements(document);
		render(els, { phase: 'done', verdict: { label: 'NDD', confidence: 0.6 } });
		expect(els.verdictCard.classList.contains('ndd')).toBe(true);
		expect(els.verdictCard.classList.contains('dd')).toBe(false);
		expect(els.verdictConfidence.textContent).toContain('60.0%');
	});

	it('shows the error message and hides any verdict', () => {
		const els = bindElements(document);
		render(els, { phase: 'done', verdict: { label: 'DD', confidence: 0.9 } });
		render(els, { phase: 'error', errorMessage: 'file exceeds 50 MB' });
		expect(els.status.textContent).toBe('file exceeds 50 MB');
		expect(els.status.classList.contains('error')).toBe(true);
		expect(els.verdictCard.hidden).toBe(true);
	});

	it('disables submission while a request is in flight', () => {
		const els = bindElements(document);
		for (const phase of ['uploading', 'classifying'] as const) {
			render(els, { phase });
			expect(els.classifyButton.disabled).toBe(true);
			expect(els.urlButton.disabled).toBe(true);
		}
		render(els, { phase: 'idle' });
		expect(els.classifyButton.disabled).toBe(false);
		expect(els.urlButton.disabled).toBe(false);
	});

	it('announces the busy phases in the status line', () => {
		const els = bindElements(document);
		render(els, { phase: 'uploading' });
		expect(els.status.textContent).toContain('Uploading');
		render(els, { phase: 'classifying' });
		expect(els.status.textContent).toContain('Classifying');
	});
});
