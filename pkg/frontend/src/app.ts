// UI state machine. Holds no DOM references so the submit flows can be
// driven and inspected in tests through an injected transport.

import { errorDetail, parseVerdict, ServiceReply, Transport, Verdict } from './api.js';

export type Phase = 'idle' | 'uploading' | 'classifying' | 'done' | 'error';

export interface UiState {
	phase: Phase;
	verdict?: Verdict;
	errorMessage?: string;
}

// Client-side mirror of the limits the service enforces, so obviously bad
// submissions are rejected inline without a network round trip.
export const MAX_UPLOAD_BYTES = 50 * 1024 * 1024;
export const ACCEPTED_EXTENSIONS = ['wav', 'mp3', 'mp4', 'aiff', 'aac', 'ogg', 'flac'];

export function fileExtension(name: string): string {
	const dot = name.lastIndexOf('.');
	return dot < 0 ? '' : name.slice(dot + 1).toLowerCase();
}

export class Classifier {
	state: UiState = { phase: 'idle' };

	constructor(
		private readonly transport: Transport,
		private readonly onChange: (state: UiState) => void,
	) {}

	busy(): boolean {
		return this.state.phase === 'uploading' || this.state.phase === 'classifying';
	}

	async submitFile(file: File | null): Promise<void> {
		if (this.busy()) return;
		if (file === null) {
			this.fail('choose an audio file first');
			return;
		}
		const ext = fileExtension(file.name);
		if (!ACCEPTED_EXTENSIONS.includes(ext)) {
			this.fail(`unsupported file type ".${ext}" — accepted: ${ACCEPTED_EXTENSIONS.join(', ')}`);
			return;
		}
		if (file.size > MAX_UPLOAD_BYTES) {
			this.fail('file exceeds 50 MB');
			return;
		}
		this.setState({ phase: 'uploading' });
		let reply: ServiceReply;
		try {
			reply = await this.transport.postFile(file, () => {
				if (this.state.phase === 'uploading') this.setState({ phase: 'classifying' });
			});
		} catch (err) {
			this.fail(err instanceof Error ? err.message : 'upload failed');
			return;
		}
		this.applyReply(reply);
	}

	async submitUrl(rawUrl: string): Promise<void> {
		if (this.busy()) return;
		const url = rawUrl.trim();
		if (url === '') {
			this.fail('enter a URL first');
			return;
		}
		if (!/^https?:\/\/\S+$/i.test(url)) {
			this.fail('URL must start with http:// or https://');
			return;
		}
		this.setState({ phase: 'classifying' });
		let reply: ServiceReply;
		try {
			reply = await this.transport.postUrl(url);
		} catch (err) {
			this.fail(err instanceof Error ? err.message : 'request failed');
			return;
		}
		this.applyReply(reply);
	}

	// A verdict is only ever taken verbatim from a successful service reply.
	private applyReply(reply: ServiceReply): void {
		if (reply.status >= 200 && reply.status < 300) {
			const verdict = parseVerdict(reply.body);
			if (verdict === null) {
				this.fail('unexpected response from the service');
				return;
			}
			this.setState({ phase: 'done', verdict });
			return;
		}
		this.fail(errorDetail(reply));
	}

	private fail(message: string): void {
		this.setState({ phase: 'error', errorMessage: message });
	}

	private setState(state: UiState): void {
		this.state = state;
		this.onChange(state);
	}
}
