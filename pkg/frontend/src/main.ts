// Wires the page controls to the state machine. boot.ts calls initApp with
// the real HTTP transport; tests call it with a fake one.

import { fetchHealth, Transport } from './api.js';
import { Classifier } from './app.js';
import { bindElements, render } from './render.js';

export function initApp(doc: Document, transport: Transport): Classifier {
	const els = bindElements(doc);
	const classifier = new Classifier(transport, (state) => render(els, state));
	render(els, classifier.state);

	let selected: File | null = null;
	const fileInput = mustFindInput(doc, 'file-input');

	const selectFile = (file: File) => {
		selected = file;
		els.fileName.textContent = file.name;
		els.dropZone.classList.add('has-file');
	};

	els.dropZone.addEventListener('click', () => fileInput.click());
	els.dropZone.addEventListener('dragover', (e) => {
		e.preventDefault();
		els.dropZone.classList.add('dragover');
	});
	els.dropZone.addEventListener('dragleave', () => els.dropZone.classList.remove('dragover'));
	els.dropZone.addEventListener('drop', (e) => {
		e.preventDefault();
		els.dropZone.classList.remove('dragover');
		const files = (e as DragEvent).dataTransfer?.files;
		if (files !== undefined && files.length > 0) selectFile(files[0]);
	});
	fileInput.addEventListener('change', () => {
		if (fileInput.files !== null && fileInput.files.length > 0) selectFile(fileInput.files[0]);
	});

	els.classifyButton.addEventListener('click', () => {
		void classifier.submitFile(selected);
	});
	els.urlButton.addEventListener('click', () => {
		void classifier.submitUrl(els.urlInput.value);
	});
	els.urlInput.addEventListener('keydown', (e) => {
		if ((e as KeyboardEvent).key === 'Enter') void classifier.submitUrl(els.urlInput.value);
	});

	void fetchHealth().then((health) => {
		if (health !== null && !health.modelLoaded) {
			els.healthBanner.hidden = false;
			els.healthBanner.textContent = 'The service is up but has no model loaded; submissions will fail.';
		}
	});

	return classifier;
}

function mustFindInput(doc: Document, id: string): HTMLInputElement {
	const el = doc.getElementById(id);
	if (!(el instanceof HTMLInputElement)) throw new Error(`missing input #${id}`);
	return el;
}
