"""HTTP surface: read endpoints are open, write endpoints need a bearer token.

Every response that has a CLI twin is produced by the same ``Service`` byte
producer, so API and CLI reports are interchangeable.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import Depends, FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from . import errors
from .incidents import IncidentQuery
from .jsonio import to_json_bytes
from .service import Config, Service

STATUS_BY_ERROR: list[tuple[type, int]] = [
    (errors.AuthError, 401),
    (errors.NotFoundError, 404),
    (errors.UnknownIdError, 404),
    (errors.RoundClosedError, 409),
    (errors.RoundOpenError, 409),
    (errors.ConflictError, 409),
    (errors.UnknownSelectionError, 422),
    (errors.InvalidStatusError, 422),
    (errors.ConflictingStatusError, 422),
    (errors.TaxonomyInvalid, 422),
    (errors.EmptyRoundError, 422),
    (errors.EmptyInputError, 422),
    (errors.NoPairableUnitsError, 422),
    (errors.DegenerateDataError, 422),
    (errors.ParseError, 400),
    (errors.IngestError, 400),
    (errors.UnsupportedFormatError, 400),
    (errors.HarmtaxError, 500),
]


def http_status(exc: errors.HarmtaxError) -> int:
    for klass, status in STATUS_BY_ERROR:
        if isinstance(exc, klass):
            return status
    return 500


class SelectionIn(BaseModel):
    harm_type_id: str
    specific_harm_id: str
    status: str


class AnnotationIn(BaseModel):
    round_id: str
    incident_id: str
    selections: list[SelectionIn] = Field(default_factory=list)
    comment: str | None = None


class RoundIn(BaseModel):
    label: str
    taxonomy_version: str
    incident_ids: list[str]


def json_response(payload: bytes, status_code: int = 200) -> Response:
    return Response(content=payload, status_code=status_code, media_type="application/json")


def create_app(config: Config, service: Service | None = None) -> FastAPI:
    svc = service or Service(config)
    app = FastAPI(title="harmtax", version="0.1.0")
    app.state.service = svc
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(errors.HarmtaxError)
    async def handle_harmtax_error(request: Request, exc: errors.HarmtaxError):
        status = http_status(exc)
        body = {
            "error": {
                "status": status,
                "code": exc.code,
                "message": exc.message,
                "path": exc.path,
            }
        }
        return json_response(to_json_bytes(body), status_code=status)

    def authed_annotator(request: Request) -> str:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise errors.AuthError("missing bearer token")
        token = header[7:].strip()
        return svc.engine.authenticate(token, svc.config.token_secret)

    # -- taxonomy -----------------------------------------------------------

    @app.get("/api/taxonomy")
    def get_taxonomy(version: str | None = None):
        return json_response(svc.taxonomy_export(version))

    @app.get("/api/taxonomy/diff")
    def get_taxonomy_diff(old: str, new: str):
        return json_response(svc.taxonomy_diff_export(old, new))

    # -- incidents ----------------------------------------------------------

    @app.get("/api/incidents")
    def list_incidents(
        text: str | None = None,
        sector: str | None = None,
        date_from: str | None = Query(None, alias="from"),
        date_to: str | None = Query(None, alias="to"),
        offset: int = Query(0, ge=0),
        limit: int = Query(50, ge=1),
    ):
        q = IncidentQuery(
            text=text,
            sector=sector,
            date_from=date_from,
            date_to=date_to,
            offset=offset,
            limit=limit,
        )
        return json_response(to_json_bytes(svc.incident_page_dict(q)))

    @app.get("/api/incidents/{incident_id}")
    def get_incident(incident_id: str):
        return json_response(to_json_bytes(svc.incidents.get(incident_id).as_dict()))

    # -- rounds ---------------------------------------------------------------

    @app.get("/api/rounds")
    def list_rounds():
        return json_response(
            to_json_bytes([r.as_dict() for r in svc.engine.list_rounds()])
        )

    @app.post("/api/rounds")
    def open_round(body: RoundIn, annotator: str = Depends(authed_annotator)):
        rnd = svc.engine.open_round(body.label, body.taxonomy_version, body.incident_ids)
        return json_response(to_json_bytes(rnd.as_dict()), status_code=201)

    @app.get("/api/rounds/{round_id}")
    def get_round(round_id: str):
        return json_response(to_json_bytes(svc.engine.get_round(round_id).as_dict()))

    @app.post("/api/rounds/{round_id}/close")
    def close_round(round_id: str, annotator: str = Depends(authed_annotator)):
        return json_response(to_json_bytes(svc.engine.close_round(round_id).as_dict()))

    # -- annotations -----------------------------------------------------------

    @app.post("/api/annotations")
    def submit_annotation(body: AnnotationIn, annotator: str = Depends(authed_annotator)):
        annotation = svc.engine.submit(
            incident_id=body.incident_id,
            annotator_id=annotator,
            round_id=body.round_id,
            selections=[s.model_dump() for s in body.selections],
            comment=body.comment,
        )
        return json_response(to_json_bytes(annotation.as_dict()))

    @app.get("/api/rounds/{round_id}/annotations")
    def round_annotations(round_id: str, incident: str | None = None):
        if incident is None:
            annotations = svc.engine.annotations_for_round(round_id)
        else:
            annotations = svc.engine.annotations_for(incident, round_id)
        return json_response(to_json_bytes([a.as_dict() for a in annotations]))

    # -- reports -----------------------------------------------------------------

    @app.get("/api/rounds/{round_id}/agreement")
    def round_agreement(
        round_id: str,
        mode: str = "set",
        status: str = Query("ignore", alias="status"),
        ci: bool = False,
        resamples: int = 1000,
        confidence: float = 0.95,
        seed: int = 0,
    ):
        return json_response(
            svc.agreement_export(
                round_id,
                mode=mode,
                status_handling=status,
                ci=ci,
                resamples=resamples,
                confidence=confidence,
                seed=seed,
            )
        )

    @app.get("/api/rounds/{round_id}/summary")
    def round_summary_endpoint(round_id: str):
        return json_response(svc.summary_export(round_id))

    @app.get("/api/rounds/{round_id}/sankey")
    def round_sankey(round_id: str, incident: str):
        return json_response(svc.sankey_export(round_id, incident))

    @app.get("/api/trend")
    def trend(rounds: str | None = None):
        round_ids = [r for r in rounds.split(",") if r] if rounds else None
        return json_response(svc.trend_export(round_ids))

    if config.static_dir and Path(config.static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app


def serve(config: Config) -> None:
    """Run the HTTP service until interrupted (uvicorn handles signals)."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
