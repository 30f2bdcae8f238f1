// Page entry point; kept separate so modules stay side-effect free for tests.

import { httpTransport } from './api.js';
import { initApp } from './main.js';

window.addEventListener('load', () => {
	initApp(document, httpTransport());
	console.log('webui ready');
});
