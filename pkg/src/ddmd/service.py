"""HTTP classification service.

create_app builds a FastAPI app around one immutable loaded model. Uploads
and URL fetches spool to a temporary file (deleted after the request), the
size limit is enforced before any decoding starts, and both endpoints share
the exact pipeline cmd_predict uses, so verdicts agree by construction.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
import urllib.error
import urllib.parse
import urllib.request
from pathlib import Path

from fastapi import FastAPI, HTTPException, UploadFile
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import ACCEPTED_EXTENSIONS, DEFAULT_CONFIG, FEATURE_SCHEMA_VERSION, MODEL_SCHEMA_VERSION, PipelineConfig
from .errors import DecodeError, InvalidInput, TranscodeFailed, TranscoderUnavailable, UnsupportedFormat
from .features import extract_feature_vector
from .forest import load_model, predict, predict_proba
from .audio_io import load_audio

DEFAULT_MAX_UPLOAD_BYTES = 50 * 1024 * 1024
_COPY_CHUNK = 1 << 20


class ClassifyResponse(BaseModel):
    label: str
    confidence: float
    features_version: int
    duration_ms: int


class ClassifyUrlRequest(BaseModel):
    url: str


def _resolve_limit(max_upload_bytes: int | None) -> int:
    if max_upload_bytes is not None:
        return max_upload_bytes
    env = os.environ.get("DDMD_MAX_UPLOAD_BYTES")
    return int(env) if env else DEFAULT_MAX_UPLOAD_BYTES


def create_app(
    model_path: str | Path | None = None,
    max_upload_bytes: int | None = None,
    fetch_timeout_s: float = 30.0,
    static_dir: str | Path | None = None,
    config: PipelineConfig = DEFAULT_CONFIG,
    downloader: str | None = None,
) -> FastAPI:
    """Build the service app.

    Args:
        model_path: forest model JSON; a missing file starts the app with no
            model loaded (classification returns 503 until restart).
        max_upload_bytes: body size limit; default env DDMD_MAX_UPLOAD_BYTES
            or 50 MiB.
        static_dir: optional directory of web assets mounted at /.
        downloader: optional command template with a {url} placeholder that
            writes audio bytes to stdout; replaces the built-in HTTP fetch.
    """
    limit = _resolve_limit(max_upload_bytes)
    model = None
    if model_path is not None:
        try:
            model = load_model(model_path)
        except FileNotFoundError:
            model = None

    app = FastAPI(title="ddmd")

    @app.middleware("http")
    async def reject_oversize_early(request, call_next):
        # Declared-size check before the body is read at all.
        if request.url.path.startswith("/classify"):
            declared = request.headers.get("content-length")
            if declared is not None and declared.isdigit() and int(declared) > limit:
                return JSONResponse(status_code=413,
                                    content={"detail": f"body exceeds {limit} byte limit"})
        return await call_next(request)

    def classify_spooled(tmp_path: Path) -> ClassifyResponse:
        if model is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        started = time.perf_counter()
        try:
            clip = load_audio(tmp_path, config=config.audio)
            vector = extract_feature_vector(clip, config)
        except UnsupportedFormat as exc:
            raise HTTPException(status_code=415, detail=str(exc)) from exc
        except (DecodeError, InvalidInput, TranscoderUnavailable, TranscodeFailed) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        label_id = predict(model, vector.values)
        p1 = predict_proba(model, vector.values)
        return ClassifyResponse(
            label=model.label_names.get(label_id, str(label_id)),
            confidence=p1 if label_id == 1 else 1.0 - p1,
            features_version=FEATURE_SCHEMA_VERSION,
            duration_ms=int(round((time.perf_counter() - started) * 1000)),
        )

    def spool_and_classify(read_chunk, ext: str) -> ClassifyResponse:
        """Copy a chunked byte source to a temp file (capped) and classify it."""
        tmp = tempfile.NamedTemporaryFile(suffix=f".{ext}" if ext else ".bin", delete=False)
        try:
            total = 0
            with tmp:
                while True:
                    chunk = read_chunk(_COPY_CHUNK)
                    if not chunk:
                        break
                    total += len(chunk)
                    if total > limit:
                        raise HTTPException(status_code=413,
                                            detail=f"body exceeds {limit} byte limit")
                    tmp.write(chunk)
            return classify_spooled(Path(tmp.name))
        finally:
            os.unlink(tmp.name)

    @app.post("/classify", response_model=ClassifyResponse)
    def classify(file: UploadFile) -> ClassifyResponse:
        ext = Path(file.filename or "").suffix.lower().lstrip(".")
        if ext not in ACCEPTED_EXTENSIONS:
            raise HTTPException(status_code=415,
                                detail=f"unsupported extension {ext!r}; accepted: "
                                       + ", ".join(ACCEPTED_EXTENSIONS))
        return spool_and_classify(file.file.read, ext)

    def fetch_via_downloader(url: str) -> ClassifyResponse:
        command = [tok.replace("{url}", url) for tok in shlex.split(downloader)]
        try:
            result = subprocess.run(command, capture_output=True, timeout=fetch_timeout_s)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise HTTPException(status_code=502, detail=f"downloader failed: {exc}") from exc
        if result.returncode != 0:
            tail = result.stderr.decode("utf-8", "replace")[-500:]
            raise HTTPException(status_code=502,
                                detail=f"downloader exited {result.returncode}: {tail}")
        data = result.stdout
        if len(data) > limit:
            raise HTTPException(status_code=413, detail=f"body exceeds {limit} byte limit")
        stream = [data]
        return spool_and_classify(lambda _size: stream.pop() if stream else b"",
                                  _url_extension(url) or "wav")

    @app.post("/classify-url", response_model=ClassifyResponse)
    def classify_url(body: ClassifyUrlRequest) -> ClassifyResponse:
        parsed = urllib.parse.urlparse(body.url)
        if parsed.scheme not in ("http", "https") or not parsed.netloc:
            raise HTTPException(status_code=422,
                                detail=f"expected an absolute http(s) URL, got {body.url!r}")
        if downloader is not None:
            return fetch_via_downloader(body.url)
        request = urllib.request.Request(body.url, headers={"User-Agent": "ddmd/1"})
        try:
            with urllib.request.urlopen(request, timeout=fetch_timeout_s) as response:
                declared = response.headers.get("Content-Length")
                if declared is not None and declared.isdigit() and int(declared) > limit:
                    raise HTTPException(status_code=413,
                                        detail=f"remote body exceeds {limit} byte limit")
                ext = _url_extension(body.url)
                return spool_and_classify(response.read, ext)
        except urllib.error.HTTPError as exc:
            raise HTTPException(status_code=502,
                                detail=f"upstream returned {exc.code}") from exc
        except (urllib.error.URLError, TimeoutError) as exc:
            raise HTTPException(status_code=502, detail=f"fetch failed: {exc}") from exc

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "model_loaded": model is not None,
            "schema_version": MODEL_SCHEMA_VERSION,
        }

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="webui")

    return app


def _url_extension(url: str) -> str:
    return Path(urllib.parse.urlparse(url).path).suffix.lower().lstrip(".")
