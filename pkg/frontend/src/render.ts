// Projects a UiState onto the page. DD verdicts get warning styling, NDD
// stays neutral; submit controls are disabled while a request is in flight.

import { UiState } from './app.js';

export interface Elements {
	dropZone: HTMLElement;
	fileName: HTMLElement;
	classifyButton: HTMLButtonElement;
	urlInput: HTMLInputElement;
	urlButton: HTMLButtonElement;
	status: HTMLElement;
	verdictCard: HTMLElement;
	verdictLabel: HTMLElement;
	verdictConfidence: HTMLElement;
	verdictNote: HTMLElement;
	healthBanner: HTMLElement;
}

export function bindElements(doc: Document): Elements {
	return {
		dropZone: mustFind(doc, 'drop-zone'),
		fileName: mustFind(doc, 'file-name'),
		classifyButton: mustFind(doc, 'classify-button') as HTMLButtonElement,
		urlInput: mustFind(doc, 'url-input') as HTMLInputElement,
		urlButton: mustFind(doc, 'url-button') as HTMLButtonElement,
		status: mustFind(doc, 'status'),
		verdictCard: mustFind(doc, 'verdict-card'),
		verdictLabel: mustFind(doc, 'verdict-label'),
		verdictConfidence: mustFind(doc, 'verdict-confidence'),
		verdictNote: mustFind(doc, 'verdict-note'),
		healthBanner: mustFind(doc, 'health-banner'),
	};
}

export function render(els: Elements, state: UiState): void {
	const busy = state.phase === 'uploading' || state.phase === 'classifying';
	els.classifyButton.disabled = busy;
	els.urlButton.disabled = busy;

	els.status.className = 'status';
	if (state.phase === 'uploading') {
		els.status.textContent = 'Uploading…';
	} else if (state.phase === 'classifying') {
		els.status.textContent = 'Classifying…';
	} else if (state.phase === 'error') {
		els.status.textContent = state.errorMessage ?? 'something went wrong';
		els.status.classList.add('error');
	} else {
		els.status.textContent = '';
	}

	if (state.phase === 'done' && state.verdict !== undefined) {
		const verdict = state.verdict;
		els.verdictCard.hidden = false;
		els.verdictCard.className = verdict.label === 'DD' ? 'verdict dd' : 'verdict ndd';
		els.verdictLabel.textContent = verdict.label;
		els.verdictConfidence.textContent = `${(verdict.confidence * 100).toFixed(1)}% confidence`;
		els.verdictNote.textContent = verdict.label === 'DD'
			? 'Digital drug patterns detected: binaural beats or isochronic tones.'
			: 'No digital drug patterns detected.';
	} else {
		els.verdictCard.hidden = true;
	}
}

function mustFind(doc: Document, id: string): HTMLElement {
	const el = doc.getElementById(id);
	if (el === null) throw new Error(`missing element #${id}`);
	return el;
}
