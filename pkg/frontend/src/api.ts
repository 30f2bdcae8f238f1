// HTTP plumbing for the classification service: request transports plus
// the minimal parsing needed to turn replies into verdicts or messages.

export interface Verdict {
	label: string;
	confidence: number;
}

export interface ServiceReply {
	status: number;
	body: unknown;
}

export interface Transport {
	postFile(file: File, onUploadDone: () => void): Promise<ServiceReply>;
	postUrl(url: string): Promise<ServiceReply>;
}

export function parseVerdict(body: unknown): Verdict | null {
	if (typeof body !== 'object' || body === null) return null;
	const record = body as Record<string, unknown>;
	if (typeof record.label !== 'string' || typeof record.confidence !== 'number') return null;
	return { label: record.label, confidence: record.confidence };
}

export function errorDetail(reply: ServiceReply): string {
	if (typeof reply.body === 'object' && reply.body !== null) {
		const detail = (reply.body as Record<string, unknown>).detail;
		if (typeof detail === 'string' && detail.length > 0) return detail;
	}
	return `request failed (HTTP ${reply.status})`;
}

export function httpTransport(): Transport {
	return {
		postFile(file: File, onUploadDone: () => void): Promise<ServiceReply> {
			return new Promise((resolve, reject) => {
				const form = new FormData();
				form.append('file', file, file.name);
				const xhr = new XMLHttpRequest();
				xhr.open('POST', '/classify');
				xhr.upload.onload = () => onUploadDone();
				xhr.onload = () => resolve({ status: xhr.status, body: tryParseJson(xhr.responseText) });
				xhr.onerror = () => reject(new Error('could not reach the classification service'));
				xhr.send(form);
			});
		},
		async postUrl(url: string): Promise<ServiceReply> {
			const response = await fetch('/classify-url', {
				method: 'POST',
				headers: { 'Content-Type': 'application/json' },
				body: JSON.stringify({ url }),
			});
			return { status: response.status, body: tryParseJson(await response.text()) };
		},
	};
}

export async function fetchHealth(): Promise<{ modelLoaded: boolean } | null> {
	try {
		const response = await fetch('/health');
		if (!response.ok) return null;
		const body = (await response.json()) as Record<string, unknown>;
		return { modelLoaded: body.model_loaded === true };
	} catch {
		return null;
	}
}

function tryParseJson(text: string): unknown {
	try {
		return JSON.parse(text);
	} catch {
		return null;
	}
}
