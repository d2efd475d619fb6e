"""FastAPI application around the simulator.

The app hosts one live interactive mission (engine task plus TCP and
WebSocket command endpoints, started in the lifespan) and exposes batch
endpoints for scripted runs and log analysis.
"""

from __future__ import annotations

import asyncio
import tempfile
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from .. import __version__
from ..config import ConfigError, MissionConfig, config_to_dict, default_config, load_config
from ..control import band_edges
from ..missionlog import LogError, summarize
from ..mission import ScriptError, analyze, parse_script, run_scripted
from .models import (
    AnalyzeRequest,
    AnalyzeResponse,
    ConfigResponse,
    HealthResponse,
    MissionRequest,
    MissionResponse,
    MissionSummary,
    ProfileResponse,
    StatusResponse,
)
from ..runtime import ServerRuntime


def create_app(
    config: MissionConfig | None = None,
    out_dir: str | Path | None = None,
    seed: int = 0,
    *,
    listen: tuple[str, int] = ("127.0.0.1", 7070),
    ws: tuple[str, int] = ("127.0.0.1", 7071),
    realtime: bool = True,
    on_end=None,
) -> FastAPI:
    cfg = config if config is not None else default_config()
    root = Path(out_dir) if out_dir is not None else Path(tempfile.mkdtemp(prefix="auvsim-"))

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        runtime = ServerRuntime(
            cfg, root, seed, listen=listen, ws=ws, realtime=realtime, on_end=on_end
        )
        await runtime.start()
        app.state.runtime = runtime
        try:
            yield
        finally:
            await runtime.stop()

    app = FastAPI(title="auvsim", version=__version__, lifespan=lifespan)
    # the web console is served from its own origin (vite dev server or a
    # static file) and reads these endpoints directly
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(version=__version__)

    @app.get("/status", response_model=StatusResponse)
    async def status() -> StatusResponse:
        runtime: ServerRuntime = app.state.runtime
        engine = runtime.engine
        info = engine.status()
        return StatusResponse(
            depth_m=engine.state.depth_m,
            records=len(engine.log.records),
            fixes=len(engine.log.fixes),
            **info,
        )

    @app.get("/config", response_model=ConfigResponse)
    async def get_config() -> ConfigResponse:
        return ConfigResponse(**config_to_dict(cfg))

    @app.get("/profile", response_model=ProfileResponse)
    async def profile() -> ProfileResponse:
        """The live mission's recorded depth profile and float track so far.

        The command link only exists at the surface, so a console can never
        watch the submerged part of a dive live; this is where it gets the
        full curve from.
        """
        engine = app.state.runtime.engine
        records = list(engine.log.records)
        fixes = list(engine.log.fixes)
        if not records:
            return ProfileResponse(summary=None, depth_profile=[], track=[])
        lo, hi = band_edges(engine.control)
        return ProfileResponse(
            summary=MissionSummary(**summarize(records, fixes, lo, hi)),
            depth_profile=[(r.t_s, r.sensed_depth_m) for r in records],
            track=[(f.float_x_m, f.float_y_m) for f in fixes],
        )

    @app.post("/missions", response_model=MissionResponse)
    async def run_mission(req: MissionRequest) -> MissionResponse:
        try:
            mission_cfg = (
                load_config(req.config_path, req.overrides)
                if req.config_path is not None or req.overrides
                else cfg
            )
        except (ConfigError, OSError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        try:
            script = parse_script(
                "\n".join(req.script),
                "request",
                max_depth_m=mission_cfg.params.rope_length_m,
            )
        except ScriptError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        dest = Path(req.out_dir) if req.out_dir else Path(tempfile.mkdtemp(prefix="auvsim-run-", dir=root))
        result, _ = await asyncio.to_thread(run_scripted, mission_cfg, script, req.seed, dest)
        return MissionResponse(
            exit_code=result.exit_code,
            summary=MissionSummary(**result.summary),
            telemetry_path=str(result.telemetry_path),
            gps_path=str(result.gps_path),
            warnings=result.warnings,
            timeouts=result.timeouts,
        )

    @app.post("/analyze", response_model=AnalyzeResponse)
    async def analyze_logs(req: AnalyzeRequest) -> AnalyzeResponse:
        try:
            report_cfg = load_config(req.config_path) if req.config_path else None
            report = await asyncio.to_thread(analyze, req.log_dir, report_cfg)
        except (ConfigError, LogError, OSError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return AnalyzeResponse(
            summary=MissionSummary(**report["summary"]),
            depth_profile=report["depth_profile"],
            track=report["track"],
        )

    return app
