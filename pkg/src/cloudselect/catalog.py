"""Unified domain model for infrastructure service catalogs.

A catalog is an immutable snapshot of providers, their regions, and the
compute/storage/transfer offers sold in those regions, together with any
promotions and a static currency table. Snapshots are versioned with a
monotonically increasing id and are safe to share across threads; replacing
the active catalog is an atomic swap in :class:`CatalogStore`.
"""

from __future__ import annotations

import itertools
import json
import math
import threading
from dataclasses import dataclass, field

from .errors import CatalogParseError, CatalogValidationError

CONTINENTS = frozenset(
    {
        "North America",
        "South America",
        "Antarctica",
        "Africa",
        "Europe",
        "Asia",
        "Australia",
    }
)

_snapshot_counter = itertools.count(1)
_snapshot_lock = threading.Lock()


def _next_snapshot_id() -> int:
    with _snapshot_lock:
        return next(_snapshot_counter)


@dataclass(frozen=True)
class Provider:
    id: str
    name: str
    website: str


@dataclass(frozen=True)
class Region:
    id: str
    provider_id: str
    region_name: str
    continent: str
    country: str | None = None


@dataclass(frozen=True)
class PriceTier:
    """One band of a graduated price schedule.

    ``lower`` is inclusive, ``upper`` exclusive; an unbounded top tier uses
    ``upper=math.inf``. Prices are per GB (per month for storage).
    """

    lower: float
    upper: float
    unit_price: float


@dataclass(frozen=True)
class ComputeOffer:
    id: str
    region_id: str
    name: str
    cores: int
    threads_per_core_or_vm: int
    memory: float
    local_storage: float
    os_family: str
    hourly_rate: float
    relative_speed: float = 1.0


@dataclass(frozen=True)
class StorageOffer:
    id: str
    region_id: str
    name: str
    tiers: tuple[PriceTier, ...]
    free_quota: float = 0.0


@dataclass(frozen=True)
class TransferOffer:
    id: str
    region_id: str
    name: str
    inbound_tiers: tuple[PriceTier, ...]
    outbound_tiers: tuple[PriceTier, ...]
    inbound_free_quota: float = 0.0
    outbound_free_quota: float = 0.0


@dataclass(frozen=True)
class Promotion:
    offer_id: str
    kind: str  # percent_discount | flat_credit
    value: float
    valid_months: int = 1


@dataclass(frozen=True)
class CurrencyTable:
    """Static conversion table: units of each currency per 1 base unit."""

    base_code: str
    rates: dict[str, float]

    def __contains__(self, code: str) -> bool:
        return code in self.rates


@dataclass(frozen=True)
class Violation:
    """One broken catalog invariant, locating the entity, field, and rule."""

    entity: str
    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.field}: {self.rule}"


@dataclass(frozen=True)
class ProviderCatalog:
    """Immutable, versioned snapshot of the whole service inventory."""

    providers: tuple[Provider, ...]
    regions: tuple[Region, ...]
    compute_offers: tuple[ComputeOffer, ...]
    storage_offers: tuple[StorageOffer, ...]
    transfer_offers: tuple[TransferOffer, ...]
    promotions: tuple[Promotion, ...]
    currency_table: CurrencyTable
    snapshot_id: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "_providers_by_id", {p.id: p for p in self.providers})
        object.__setattr__(self, "_regions_by_id", {r.id: r for r in self.regions})
        offers = {}
        for o in self.compute_offers + self.storage_offers + self.transfer_offers:
            offers[o.id] = o
        object.__setattr__(self, "_offers_by_id", offers)
        promos: dict[str, list[Promotion]] = {}
        for promo in self.promotions:
            promos.setdefault(promo.offer_id, []).append(promo)
        object.__setattr__(self, "_promotions_by_offer", promos)

    def provider(self, provider_id: str) -> Provider:
        return self._providers_by_id[provider_id]

    def region(self, region_id: str) -> Region:
        return self._regions_by_id[region_id]

    def offer(self, offer_id: str):
        return self._offers_by_id[offer_id]

    def has_offer(self, offer_id: str) -> bool:
        return offer_id in self._offers_by_id

    def promotions_for(self, offer_id: str) -> list[Promotion]:
        return list(self._promotions_by_offer.get(offer_id, ()))

    def region_of_offer(self, offer_id: str) -> Region:
        return self.region(self.offer(offer_id).region_id)

    def provider_of_offer(self, offer_id: str) -> Provider:
        return self.provider(self.region_of_offer(offer_id).provider_id)


def _require(obj: dict, key: str, kind, context: str):
    if key not in obj:
        raise CatalogParseError(f"{context}: missing required field '{key}'")
    value = obj[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind is str and isinstance(value, str):
        return value
    raise CatalogParseError(
        f"{context}: field '{key}' must be {kind.__name__}, got {type(value).__name__}"
    )


def _optional(obj: dict, key: str, kind, default, context: str):
    if key not in obj or obj[key] is None:
        return default
    return _require(obj, key, kind, context)


def _parse_tiers(raw, context: str) -> tuple[PriceTier, ...]:
    if not isinstance(raw, list):
        raise CatalogParseError(f"{context}: tiers must be an array")
    tiers = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise CatalogParseError(f"{context}: tier {i} must be an object")
        ctx = f"{context} tier {i}"
        upper_raw = entry.get("upper")
        if upper_raw is None:
            upper = math.inf
        elif isinstance(upper_raw, (int, float)) and not isinstance(upper_raw, bool):
            upper = float(upper_raw)
        else:
            raise CatalogParseError(f"{ctx}: field 'upper' must be a number or null")
        tiers.append(
            PriceTier(
                lower=_require(entry, "lower", float, ctx),
                upper=upper,
                unit_price=_require(entry, "unit_price", float, ctx),
            )
        )
    return tuple(tiers)


def parse_catalog_document(document: str) -> ProviderCatalog:
    """Parse a catalog JSON document into an (unvalidated) snapshot."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise CatalogParseError(f"malformed catalog document: {exc}") from exc
    if not isinstance(raw, dict):
        raise CatalogParseError("catalog document must be a JSON object")

    def section(name: str) -> list:
        value = raw.get(name, [])
        if not isinstance(value, list):
            raise CatalogParseError(f"top-level '{name}' must be an array")
        return value

    providers = tuple(
        Provider(
            id=_require(p, "id", str, "provider"),
            name=_require(p, "name", str, "provider"),
            website=_require(p, "website", str, "provider"),
        )
        for p in section("providers")
    )
    regions = tuple(
        Region(
            id=_require(r, "id", str, "region"),
            provider_id=_require(r, "provider_id", str, "region"),
            region_name=_require(r, "region_name", str, "region"),
            continent=_require(r, "continent", str, "region"),
            country=_optional(r, "country", str, None, "region"),
        )
        for r in section("regions")
    )
    compute = tuple(
        ComputeOffer(
            id=_require(o, "id", str, "compute_offer"),
            region_id=_require(o, "region_id", str, "compute_offer"),
            name=_require(o, "name", str, "compute_offer"),
            cores=_require(o, "cores", int, "compute_offer"),
            threads_per_core_or_vm=_optional(o, "threads_per_core_or_vm", int, 1, "compute_offer"),
            memory=_require(o, "memory", float, "compute_offer"),
            local_storage=_optional(o, "local_storage", float, 0.0, "compute_offer"),
            os_family=_require(o, "os_family", str, "compute_offer"),
            hourly_rate=_require(o, "hourly_rate", float, "compute_offer"),
            relative_speed=_optional(o, "relative_speed", float, 1.0, "compute_offer"),
        )
        for o in section("compute_offers")
    )
    storage = tuple(
        StorageOffer(
            id=_require(o, "id", str, "storage_offer"),
            region_id=_require(o, "region_id", str, "storage_offer"),
            name=_require(o, "name", str, "storage_offer"),
            tiers=_parse_tiers(o.get("tiers", []), f"storage_offer {o.get('id', '?')}"),
            free_quota=_optional(o, "free_quota", float, 0.0, "storage_offer"),
        )
        for o in section("storage_offers")
    )
    transfer = tuple(
        TransferOffer(
            id=_require(o, "id", str, "transfer_offer"),
            region_id=_require(o, "region_id", str, "transfer_offer"),
            name=_require(o, "name", str, "transfer_offer"),
            inbound_tiers=_parse_tiers(
                o.get("inbound_tiers", []), f"transfer_offer {o.get('id', '?')}"
            ),
            outbound_tiers=_parse_tiers(
                o.get("outbound_tiers", []), f"transfer_offer {o.get('id', '?')}"
            ),
            inbound_free_quota=_optional(o, "inbound_free_quota", float, 0.0, "transfer_offer"),
            outbound_free_quota=_optional(o, "outbound_free_quota", float, 0.0, "transfer_offer"),
        )
        for o in section("transfer_offers")
    )
    promotions = tuple(
        Promotion(
            offer_id=_require(p, "offer_id", str, "promotion"),
            kind=_require(p, "kind", str, "promotion"),
            value=_require(p, "value", float, "promotion"),
            valid_months=_optional(p, "valid_months", int, 1, "promotion"),
        )
        for p in section("promotions")
    )

    table_raw = raw.get("currency_table", {"base_code": "USD", "rates": {"USD": 1.0}})
    if not isinstance(table_raw, dict):
        raise CatalogParseError("top-level 'currency_table' must be an object")
    rates_raw = table_raw.get("rates", {})
    if not isinstance(rates_raw, dict):
        raise CatalogParseError("currency_table: 'rates' must be an object")
    rates = {}
    for code, rate in rates_raw.items():
        if not isinstance(rate, (int, float)) or isinstance(rate, bool):
            raise CatalogParseError(f"currency_table: rate for '{code}' must be a number")
        rates[str(code)] = float(rate)
    table = CurrencyTable(
        base_code=_require(table_raw, "base_code", str, "currency_table"), rates=rates
    )

    return ProviderCatalog(
        providers=providers,
        regions=regions,
        compute_offers=compute,
        storage_offers=storage,
        transfer_offers=transfer,
        promotions=promotions,
        currency_table=table,
        snapshot_id=0,
    )


def validate_tiers(tiers: tuple[PriceTier, ...], entity: str, field_name: str) -> list[Violation]:
    """Check a tier list is contiguous from 0 with non-negative prices."""
    violations = []
    ordered = sorted(tiers, key=lambda t: t.lower)
    expected_lower = 0.0
    for i, tier in enumerate(ordered):
        if tier.lower >= tier.upper:
            violations.append(
                Violation(entity, field_name, f"tier {i}: lower must be < upper")
            )
        if tier.unit_price < 0:
            violations.append(
                Violation(entity, field_name, f"tier {i}: unit_price must be >= 0")
            )
        if tier.lower != expected_lower:
            violations.append(
                Violation(
                    entity,
                    field_name,
                    f"tier {i}: expected lower {expected_lower:g}, got {tier.lower:g} "
                    "(tiers must be contiguous from 0)",
                )
            )
        expected_lower = tier.upper
    return violations


def validate_catalog(catalog: ProviderCatalog) -> list[Violation]:
    """Return every violated invariant; an empty list means the catalog is sound."""
    v: list[Violation] = []
    provider_ids = set()
    for p in catalog.providers:
        entity = f"Provider {p.id}"
        if p.id in provider_ids:
            v.append(Violation(entity, "id", "duplicate provider id"))
        provider_ids.add(p.id)
        if not p.website:
            v.append(Violation(entity, "website", "website must be non-empty"))

    region_ids = set()
    for r in catalog.regions:
        entity = f"Region {r.id}"
        if r.id in region_ids:
            v.append(Violation(entity, "id", "duplicate region id"))
        region_ids.add(r.id)
        if r.provider_id not in provider_ids:
            v.append(
                Violation(entity, "provider_id", f"references missing provider '{r.provider_id}'")
            )
        if r.continent not in CONTINENTS:
            v.append(
                Violation(
                    entity,
                    "continent",
                    f"'{r.continent}' is not one of the seven continents",
                )
            )
        if not r.region_name:
            v.append(Violation(entity, "region_name", "region_name must be non-empty"))

    offer_ids = set()

    def check_offer_common(offer, entity: str):
        if offer.id in offer_ids:
            v.append(Violation(entity, "id", "duplicate offer id"))
        offer_ids.add(offer.id)
        if offer.region_id not in region_ids:
            v.append(
                Violation(entity, "region_id", f"references missing region '{offer.region_id}'")
            )

    for o in catalog.compute_offers:
        entity = f"ComputeOffer {o.id}"
        check_offer_common(o, entity)
        if o.cores < 1:
            v.append(Violation(entity, "cores", "cores must be >= 1"))
        if o.threads_per_core_or_vm < 1:
            v.append(Violation(entity, "threads_per_core_or_vm", "must be >= 1"))
        if o.hourly_rate < 0:
            v.append(Violation(entity, "hourly_rate", "hourly_rate must be >= 0"))
        if o.relative_speed <= 0:
            v.append(Violation(entity, "relative_speed", "relative_speed must be > 0"))

    for o in catalog.storage_offers:
        entity = f"StorageOffer {o.id}"
        check_offer_common(o, entity)
        v.extend(validate_tiers(o.tiers, entity, "tiers"))
        if o.free_quota < 0:
            v.append(Violation(entity, "free_quota", "free_quota must be >= 0"))

    for o in catalog.transfer_offers:
        entity = f"TransferOffer {o.id}"
        check_offer_common(o, entity)
        v.extend(validate_tiers(o.inbound_tiers, entity, "inbound_tiers"))
        v.extend(validate_tiers(o.outbound_tiers, entity, "outbound_tiers"))
        if o.inbound_free_quota < 0:
            v.append(Violation(entity, "inbound_free_quota", "must be >= 0"))
        if o.outbound_free_quota < 0:
            v.append(Violation(entity, "outbound_free_quota", "must be >= 0"))

    for promo in catalog.promotions:
        entity = f"Promotion on {promo.offer_id}"
        if promo.offer_id not in offer_ids:
            v.append(
                Violation(entity, "offer_id", f"references missing offer '{promo.offer_id}'")
            )
        if promo.kind not in ("percent_discount", "flat_credit"):
            v.append(Violation(entity, "kind", f"unknown promotion kind '{promo.kind}'"))
        elif promo.kind == "percent_discount" and not 0 < promo.value <= 100:
            v.append(Violation(entity, "value", "percent must be in (0, 100]"))
        elif promo.kind == "flat_credit" and promo.value < 0:
            v.append(Violation(entity, "value", "credit must be >= 0"))

    table = catalog.currency_table
    for code, rate in table.rates.items():
        if rate <= 0:
            v.append(Violation("CurrencyTable", code, "rate must be > 0"))
    base_rate = table.rates.get(table.base_code)
    if base_rate is None:
        v.append(Violation("CurrencyTable", "base_code", "base currency missing from rates"))
    elif base_rate != 1.0:
        v.append(Violation("CurrencyTable", "base_code", "base currency rate must be 1.0"))

    return v


def load_catalog(document: str) -> ProviderCatalog:
    """Parse, validate, and version a catalog document.

    Raises :class:`CatalogParseError` for structural problems and
    :class:`CatalogValidationError` (carrying the violation list) when any
    invariant is broken.
    """
    catalog = parse_catalog_document(document)
    violations = validate_catalog(catalog)
    if violations:
        raise CatalogValidationError(violations)
    return ProviderCatalog(
        providers=catalog.providers,
        regions=catalog.regions,
        compute_offers=catalog.compute_offers,
        storage_offers=catalog.storage_offers,
        transfer_offers=catalog.transfer_offers,
        promotions=catalog.promotions,
        currency_table=catalog.currency_table,
        snapshot_id=_next_snapshot_id(),
    )


def load_catalog_file(path) -> ProviderCatalog:
    with open(path, encoding="utf-8") as fh:
        return load_catalog(fh.read())


class CatalogStore:
    """Holds the active snapshot; replacement is an atomic swap."""

    def __init__(self, catalog: ProviderCatalog | None = None):
        self._lock = threading.Lock()
        self._current = catalog

    def current(self) -> ProviderCatalog:
        snapshot = self._current
        if snapshot is None:
            raise CatalogParseError("no catalog loaded")
        return snapshot

    def swap(self, catalog: ProviderCatalog) -> None:
        with self._lock:
            self._current = catalog
