"""REST facade over the recommendation engine.

Query parameters arrive as raw strings and are validated here so that every
invalid value produces HTTP 400 with a body naming the offending parameter
(FastAPI's own 422 machinery never fires for this endpoint).
"""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from ..catalog import CONTINENTS, CatalogStore, ProviderCatalog, load_catalog_file
from ..config import EngineConfig
from ..cost import UsageVector
from ..errors import BadRequestError, CloudSelectError
from ..ga import GAParams
from ..history import HistoryStore, SelectionRecord
from ..matching import (
    DEFAULT_CRITERIA,
    VAGUE_LEVELS,
    CriterionSpec,
    RequirementSpec,
)
from ..mcdm import PairwiseMatrix
from ..recommend import hybrid_recommend, rank_by_cost
from .models import (
    CatalogInfo,
    ConfigOut,
    OfferCounts,
    PopularityOut,
    SelectionAck,
    SelectionIn,
)
from .render import entry_dict, render_xml

MEDIA_TYPES = ("json", "xml")


def _parse_float(raw: str, name: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise BadRequestError(f"parameter '{name}' must be a number, got '{raw}'", parameter=name)
    if value != value or value in (float("inf"), float("-inf")):
        raise BadRequestError(f"parameter '{name}' must be finite", parameter=name)
    return value


def _parse_int(raw: str, name: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise BadRequestError(
            f"parameter '{name}' must be an integer, got '{raw}'", parameter=name
        )


def _non_negative(value: float, name: str) -> float:
    if value < 0:
        raise BadRequestError(f"parameter '{name}' must be >= 0, got {value}", parameter=name)
    return value


def _parse_continents(raw: str | None) -> frozenset[str]:
    if not raw:
        return frozenset()
    names = {part.strip() for part in raw.split(",") if part.strip()}
    unknown = names - CONTINENTS
    if unknown:
        raise BadRequestError(
            f"parameter 'continent' contains unknown value(s): {', '.join(sorted(unknown))}",
            parameter="continent",
        )
    return frozenset(names)


def _parse_vague(raw: str | None, name: str) -> str | None:
    if raw is None:
        return None
    if raw not in VAGUE_LEVELS:
        raise BadRequestError(
            f"parameter '{name}' must be one of {', '.join(VAGUE_LEVELS)}", parameter=name
        )
    return raw


def _parse_criteria(raw: str | None) -> tuple[CriterionSpec, ...]:
    if not raw:
        return ()
    specs = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, direction = part.partition(":")
        direction = {"min": "minimize", "max": "maximize"}.get(direction, direction)
        specs.append(CriterionSpec(name=name.strip(), direction=direction.strip()))
    if not specs:
        raise BadRequestError("parameter 'criteria' is empty", parameter="criteria")
    return tuple(specs)


def _parse_pairwise(raw: str | None) -> PairwiseMatrix | None:
    if not raw:
        return None

    def entry(token: str) -> float:
        token = token.strip()
        if "/" in token:
            num, _, den = token.partition("/")
            try:
                return float(num) / float(den)
            except (ValueError, ZeroDivisionError):
                raise BadRequestError(
                    f"parameter 'pairwise' has a malformed entry '{token}'", parameter="pairwise"
                )
        try:
            return float(token)
        except ValueError:
            raise BadRequestError(
                f"parameter 'pairwise' has a malformed entry '{token}'", parameter="pairwise"
            )

    rows = [[entry(token) for token in row.split(",")] for row in raw.split(";") if row.strip()]
    return PairwiseMatrix.from_rows(rows)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


def create_app(
    config: EngineConfig | None = None,
    catalog: ProviderCatalog | None = None,
    history: HistoryStore | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    config = config or EngineConfig()
    if catalog is None:
        catalog = load_catalog_file(config.catalog_path)
    store = CatalogStore(catalog)
    history = history if history is not None else HistoryStore(config.history_path)

    app = FastAPI(title="cloudselect", version="0.1.0")
    app.state.catalog_store = store
    app.state.history = history
    app.state.config = config

    @app.exception_handler(CloudSelectError)
    async def domain_error_handler(_: Request, exc: CloudSelectError):
        detail: dict = {"message": str(exc)}
        parameter = getattr(exc, "parameter", None)
        if parameter:
            detail["parameter"] = parameter
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.get("/api/cost/combined")
    def combined_cost(
        media_type: str = Query("json"),
        currency: str = Query("USD"),
        storage: str | None = Query(None),
        duration: str = Query("31"),
        data_upload_size: str | None = Query(None),
        data_download_size: str | None = Query(None),
        continent: str | None = Query(None),
        min_cores: str | None = Query(None),
        min_memory: str | None = Query(None),
        os_family: str | None = Query(None),
        vague_storage: str | None = Query(None),
        vague_compute: str | None = Query(None),
        vague_traffic: str | None = Query(None),
        vm_count: str | None = Query(None),
        vm_hours_per_day: str | None = Query(None),
        criteria: str | None = Query(None),
        pairwise: str | None = Query(None),
        seed: str | None = Query(None),
        limit: str | None = Query(None),
        session: str = Query("anonymous"),
    ):
        snapshot = store.current()

        if media_type not in MEDIA_TYPES:
            raise BadRequestError(
                f"parameter 'media_type' must be one of {', '.join(MEDIA_TYPES)}, "
                f"got '{media_type}'",
                parameter="media_type",
            )
        if currency not in snapshot.currency_table.rates:
            raise BadRequestError(
                f"parameter 'currency' has unknown code '{currency}'", parameter="currency"
            )
        duration_days = _parse_int(duration, "duration")
        if not 1 <= duration_days <= 31:
            raise BadRequestError(
                f"parameter 'duration' must be in [1, 31], got {duration_days}",
                parameter="duration",
            )

        usage = UsageVector(
            storage=_non_negative(_parse_float(storage, "storage"), "storage")
            if storage is not None
            else None,
            duration_days=duration_days,
            data_upload=_non_negative(
                _parse_float(data_upload_size, "data_upload_size"), "data_upload_size"
            )
            if data_upload_size is not None
            else None,
            data_download=_non_negative(
                _parse_float(data_download_size, "data_download_size"), "data_download_size"
            )
            if data_download_size is not None
            else None,
            vm_count=_parse_int(vm_count, "vm_count") if vm_count is not None else 1,
            vm_hours_per_day=_parse_float(vm_hours_per_day, "vm_hours_per_day")
            if vm_hours_per_day is not None
            else 24.0,
        )

        vague_levels = {}
        for dimension, raw in (
            ("storage", vague_storage),
            ("compute", vague_compute),
            ("traffic", vague_traffic),
        ):
            level = _parse_vague(raw, f"vague_{dimension}")
            if level is not None:
                vague_levels[dimension] = level
        # unsized upload costs nothing; the other dimensions must be given
        if usage.data_upload is None:
            usage.data_upload = 0.0

        spec = RequirementSpec(
            usage=usage,
            continents=_parse_continents(continent),
            os_family=os_family,
            min_cores=_parse_int(min_cores, "min_cores") if min_cores is not None else 1,
            min_memory=_parse_float(min_memory, "min_memory") if min_memory is not None else 0.0,
            vague_levels=vague_levels,
            currency=currency,
            criteria=_parse_criteria(criteria),
        )

        limit_value = _parse_int(limit, "limit") if limit is not None else None
        if limit_value is not None and limit_value < 1:
            raise BadRequestError("parameter 'limit' must be >= 1", parameter="limit")

        matrix = _parse_pairwise(pairwise)
        if spec.criteria:
            if matrix is None:
                # criteria without judgments: every criterion equally important
                n = len(spec.criteria)
                matrix = PairwiseMatrix.from_rows([[1.0] * n for _ in range(n)])
            params = config.ga
            if seed is not None:
                params = GAParams(
                    population_size=params.population_size,
                    generations=params.generations,
                    crossover_rate=params.crossover_rate,
                    mutation_rate=params.mutation_rate,
                    tournament_size=params.tournament_size,
                    seed=_parse_int(seed, "seed"),
                )
            recommendations = hybrid_recommend(
                snapshot,
                spec,
                matrix,
                params,
                policy=config.compatibility_policy,
                vague_mapping=config.vague_mapping,
                popularity=history.stats(),
                cr_threshold=config.cr_threshold,
                popularity_recommended_weight=config.popularity_recommended_weight,
                limit=limit_value,
            )
        else:
            recommendations = rank_by_cost(
                snapshot,
                spec,
                policy=config.compatibility_policy,
                vague_mapping=config.vague_mapping,
                limit=limit_value,
            )

        now = _utc_now()
        for rec in recommendations:
            history.append(
                SelectionRecord(
                    timestamp=now,
                    session=session,
                    compute_id=rec.bundle.compute_id,
                    storage_id=rec.bundle.storage_id,
                    transfer_id=rec.bundle.transfer_id,
                    event="recommended",
                )
            )

        entries = [entry_dict(snapshot, rec) for rec in recommendations]
        if media_type == "xml":
            return Response(content=render_xml(entries), media_type="application/xml")
        return JSONResponse(content=entries, media_type="application/json")

    @app.post("/api/history/selection", response_model=SelectionAck)
    def record_selection(body: SelectionIn):
        snapshot = store.current()
        record = SelectionRecord(
            timestamp=body.timestamp or _utc_now(),
            session=body.session,
            compute_id=body.compute_id,
            storage_id=body.storage_id,
            transfer_id=body.transfer_id,
            event=body.event,
        )
        if not record.offer_ids:
            raise BadRequestError("at least one offer id is required", parameter="compute_id")
        for offer_id in record.offer_ids:
            if not snapshot.has_offer(offer_id):
                raise BadRequestError(f"unknown offer id '{offer_id}'", parameter="offer_id")
        stored = history.append(record)
        return SelectionAck(
            status="recorded" if stored else "duplicate",
            event=record.event,
            offer_ids=list(record.offer_ids),
        )

    @app.get("/api/history/popularity", response_model=PopularityOut)
    def popularity(offer_ids: str | None = Query(None)):
        wanted = None
        if offer_ids:
            wanted = [part.strip() for part in offer_ids.split(",") if part.strip()]
        stats = history.stats(offer_ids=wanted)
        offers = {
            offer: OfferCounts(recommended=rec, selected=sel)
            for offer, (rec, sel) in sorted(stats.counts.items())
        }
        if wanted:
            for offer in wanted:
                offers.setdefault(offer, OfferCounts(recommended=0, selected=0))
        return PopularityOut(offers=offers)

    @app.get("/api/catalog/info", response_model=CatalogInfo)
    def catalog_info():
        snapshot = store.current()
        return CatalogInfo(
            snapshot_id=snapshot.snapshot_id,
            providers=len(snapshot.providers),
            regions=len(snapshot.regions),
            compute_offers=len(snapshot.compute_offers),
            storage_offers=len(snapshot.storage_offers),
            transfer_offers=len(snapshot.transfer_offers),
        )

    @app.get("/api/config", response_model=ConfigOut)
    def engine_config():
        snapshot = store.current()
        return ConfigOut(
            continents=sorted(CONTINENTS),
            vague_levels=config.vague_mapping,
            criteria={
                name: {"direction": direction, "kind": kind}
                for name, (direction, kind) in DEFAULT_CRITERIA.items()
            },
            currencies=sorted(snapshot.currency_table.rates),
            compatibility_policy=config.compatibility_policy,
            cr_threshold=config.cr_threshold,
        )

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
