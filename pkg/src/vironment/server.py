"""Live telemetry service: WebSocket stream plus steering, paced in real time.

One session loop thread owns the simulation clock and advances one
cycle per cycle_duration of wall time.  Connected clients each get a
bounded queue; a lagging client loses its oldest messages rather than
ever stalling the loop.  Steering messages are queued and applied at
the next cycle boundary, so a recorded steering script replayed
headless reproduces the served telemetry.
"""

from __future__ import annotations

import asyncio
import logging
import os
import threading
import time
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .session import COMMAND_KINDS, Command, SessionConfig, SessionLoop
from .sonar import Scene

log = logging.getLogger("vironment.server")

CONTROL_KINDS = ("pause", "resume", "reset")
QUEUE_SIZE = 32

_PLACEHOLDER = """<!doctype html>
<html><head><title>vironment</title></head>
<body style="font-family: monospace; background: #101010; color: #9a9a9a">
<h1>vironment serve</h1>
<p>The session is streaming on <code>/ws</code>; health on <code>/health</code>.</p>
<p>No UI build found. Build the scenario studio (frontend/) and point
VIRONMENT_UI_DIR at its dist directory to get the interactive view.</p>
</body></html>
"""


class LiveSession:
    """Real-time wrapper around the deterministic session loop."""

    def __init__(self, scene: Scene, cfg: SessionConfig, script=(), pace: float = 1.0):
        self.engine = SessionLoop(scene, cfg, script)
        self.pace = pace  # wall seconds per simulated cycle_duration; 0 = flat out
        self.paused = False
        self.current_seq: int | None = None
        self._lock = threading.Lock()
        self._subscribers: dict[int, asyncio.Queue] = {}
        self._next_sub_id = 0
        self._aio_loop: asyncio.AbstractEventLoop | None = None
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    # -- lifecycle -----------------------------------------------------

    def start(self, aio_loop: asyncio.AbstractEventLoop) -> None:
        self._aio_loop = aio_loop
        self._thread = threading.Thread(target=self._run, name="session-loop", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def _run(self) -> None:
        interval = self.engine.cycle_s * self.pace
        next_deadline = time.monotonic()
        while not self._stop.is_set():
            if self.paused:
                time.sleep(0.01)
                next_deadline = time.monotonic()
                continue
            with self._lock:
                record = self.engine.step()
            message = record.to_dict()
            self.current_seq = message["seq"]
            self._broadcast(message)
            next_deadline += interval
            delay = next_deadline - time.monotonic()
            if delay > 0:
                self._stop.wait(delay)
            else:
                next_deadline = time.monotonic()  # fell behind; don't burst

    # -- client side ---------------------------------------------------

    def subscribe(self) -> tuple[int, asyncio.Queue]:
        queue: asyncio.Queue = asyncio.Queue(maxsize=QUEUE_SIZE)
        sub_id = self._next_sub_id
        self._next_sub_id += 1
        self._subscribers[sub_id] = queue
        return sub_id, queue

    def unsubscribe(self, sub_id: int) -> None:
        self._subscribers.pop(sub_id, None)

    def _broadcast(self, message: dict) -> None:
        if self._aio_loop is None or self._aio_loop.is_closed():
            return
        try:
            self._aio_loop.call_soon_threadsafe(self._publish, message)
        except RuntimeError:
            pass  # loop shut down mid-broadcast

    def _publish(self, message: dict) -> None:
        for queue in self._subscribers.values():
            if queue.full():
                queue.get_nowait()  # drop oldest; the session clock is authoritative
            queue.put_nowait(message)

    # -- steering ------------------------------------------------------

    def handle(self, message) -> dict:
        """Apply one client message, returning the reply to send back."""
        if not isinstance(message, dict) or "command" not in message:
            return {"error": "message must be an object with a 'command' field"}
        kind = message["command"]
        if kind in CONTROL_KINDS:
            if kind == "pause":
                self.paused = True
            elif kind == "resume":
                self.paused = False
            else:
                with self._lock:
                    self.engine.reset()
                self.current_seq = None
            return {"ok": kind}
        if kind in COMMAND_KINDS:
            args = message.get("args", {})
            if not isinstance(args, dict):
                return {"error": "'args' must be an object"}
            with self._lock:
                self.engine.submit(Command(t_ms=self.engine.now_ms, kind=kind, args=args))
            return {"ok": kind}
        return {"error": f"unknown command {kind!r}"}


def _ui_dir() -> Path | None:
    override = os.environ.get("VIRONMENT_UI_DIR")
    candidates = [Path(override)] if override else []
    candidates.append(Path.cwd() / "frontend" / "dist")
    for candidate in candidates:
        if candidate.is_dir() and (candidate / "index.html").is_file():
            return candidate
    return None


def create_app(scene: Scene, cfg: SessionConfig, script=(), pace: float = 1.0) -> FastAPI:
    session = LiveSession(scene, cfg, script, pace=pace)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        session.start(asyncio.get_running_loop())
        try:
            yield
        finally:
            session.stop()

    app = FastAPI(title="vironment", version=__version__, lifespan=lifespan)
    app.state.session = session

    @app.get("/health")
    async def health():
        return {"version": __version__, "seq": session.current_seq}

    @app.websocket("/ws")
    async def ws(websocket: WebSocket):
        await websocket.accept()
        sub_id, queue = session.subscribe()

        async def pump():
            while True:
                await websocket.send_json(await queue.get())

        sender = asyncio.create_task(pump())
        try:
            while True:
                try:
                    message = await websocket.receive_json()
                except ValueError:
                    await websocket.send_json({"error": "not valid JSON"})
                    continue
                await websocket.send_json(session.handle(message))
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            session.unsubscribe(sub_id)

    ui = _ui_dir()
    if ui is not None:
        app.mount("/", StaticFiles(directory=ui, html=True), name="ui")
        log.info("serving UI from %s", ui)
    else:

        @app.get("/")
        async def index():
            return HTMLResponse(_PLACEHOLDER)

    return app


def serve(
    scene: Scene,
    cfg: SessionConfig,
    script=(),
    host: str = "127.0.0.1",
    port: int = 8000,
) -> None:
    """Run the service until interrupted (the CLI `serve` subcommand)."""
    import uvicorn

    app = create_app(scene, cfg, script)
    level = os.environ.get("VIRONMENT_LOG_LEVEL", "info").lower()
    uvicorn.run(app, host=host, port=port, log_level=level)
