"""Cost computation under graduated tiers, free quotas, and promotions.

All prices in a catalog are quoted in the currency table's base currency;
conversion to the requested currency happens last, after components are
summed, so the breakdown identity ``total == sum(components)`` holds exactly
in the target currency.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import (
    ComputeOffer,
    CurrencyTable,
    PriceTier,
    ProviderCatalog,
    StorageOffer,
    TransferOffer,
    validate_tiers,
)
from .errors import BadRequestError, InvariantError

DAYS_PER_MONTH = 31


@dataclass
class UsageVector:
    """Monthly demand quantities. Fields left ``None`` await resolution
    from vague levels (see :mod:`cloudselect.matching`)."""

    storage: float | None = None
    duration_days: int = 31
    data_upload: float | None = None
    data_download: float | None = None
    vm_count: int | None = None
    vm_hours_per_day: float = 24.0

    def validate(self) -> None:
        if not 1 <= self.duration_days <= DAYS_PER_MONTH:
            raise BadRequestError(
                f"duration_days must be in [1, {DAYS_PER_MONTH}], got {self.duration_days}",
                parameter="duration",
            )
        if not 0 < self.vm_hours_per_day <= 24:
            raise BadRequestError(
                "vm_hours_per_day must be in (0, 24]", parameter="vm_hours_per_day"
            )
        for name, value in (
            ("storage", self.storage),
            ("data_upload", self.data_upload),
            ("data_download", self.data_download),
            ("vm_count", self.vm_count),
        ):
            if value is not None and value < 0:
                raise BadRequestError(f"{name} must be >= 0, got {value}", parameter=name)

    def is_fully_numeric(self) -> bool:
        return None not in (self.storage, self.data_upload, self.data_download, self.vm_count)


@dataclass(frozen=True)
class CostBreakdown:
    compute: float
    storage: float
    transfer_in: float
    transfer_out: float
    promotion_adjustment: float
    total: float
    currency: str

    ZERO_FIELDS = ("compute", "storage", "transfer_in", "transfer_out")

    @classmethod
    def zero(cls, currency: str) -> "CostBreakdown":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, currency)


def tiered_cost(usage: float, tiers: tuple[PriceTier, ...] | list[PriceTier], free_quota: float = 0.0) -> float:
    """Graduated (marginal) cost of ``usage`` GB against a contiguous tier list.

    The free quota is consumed first; each tier's rate then applies only to
    the billable quantity that falls inside that tier's band.
    """
    if usage < 0:
        raise BadRequestError(f"usage must be >= 0, got {usage}")
    tiers = tuple(tiers)
    problems = validate_tiers(tiers, "tiers", "tiers")
    if problems:
        raise InvariantError("; ".join(str(p) for p in problems))
    billable = max(0.0, usage - free_quota)
    if billable == 0 or not tiers:
        return 0.0
    cost = 0.0
    for tier in sorted(tiers, key=lambda t: t.lower):
        if billable <= tier.lower:
            break
        span = min(billable, tier.upper) - tier.lower
        cost += span * tier.unit_price
    return cost


def component_cost(offer, usage: UsageVector) -> float:
    """Monthly cost of one offer under the given usage."""
    usage.validate()
    if not usage.is_fully_numeric():
        raise BadRequestError("usage vector has unresolved quantities")
    if isinstance(offer, ComputeOffer):
        return offer.hourly_rate * usage.vm_count * usage.duration_days * usage.vm_hours_per_day
    if isinstance(offer, StorageOffer):
        monthly = tiered_cost(usage.storage, offer.tiers, offer.free_quota)
        return monthly * (usage.duration_days / DAYS_PER_MONTH)
    if isinstance(offer, TransferOffer):
        return tiered_cost(
            usage.data_upload, offer.inbound_tiers, offer.inbound_free_quota
        ) + tiered_cost(usage.data_download, offer.outbound_tiers, offer.outbound_free_quota)
    raise InvariantError(f"unknown offer type {type(offer).__name__}")


def convert_currency(amount: float, from_code: str, to_code: str, table: CurrencyTable) -> float:
    """Convert via the static table: amount x rate(to) / rate(from)."""
    for code in (from_code, to_code):
        if code not in table.rates:
            raise BadRequestError(f"unknown currency code '{code}'", parameter="currency")
    return amount * table.rates[to_code] / table.rates[from_code]


def promotion_adjustment(catalog: ProviderCatalog, offer_ids, pre_total: float) -> float:
    """Total discount (<= 0) from active promotions on the given offers.

    Percent discounts apply to the pre-adjustment total; flat credits are
    capped so the combined adjustment never drives the total negative.
    """
    discount = 0.0
    for offer_id in offer_ids:
        for promo in catalog.promotions_for(offer_id):
            if promo.valid_months < 1:
                continue
            if promo.kind == "percent_discount":
                discount += pre_total * promo.value / 100.0
            elif promo.kind == "flat_credit":
                discount += promo.value
    return -min(discount, pre_total)


def bundle_cost(
    catalog: ProviderCatalog,
    bundle,
    usage: UsageVector,
    target_currency: str,
) -> CostBreakdown:
    """Full breakdown for one bundle, converted to the target currency last."""
    table = catalog.currency_table
    if target_currency not in table.rates:
        raise BadRequestError(
            f"unknown currency code '{target_currency}'", parameter="currency"
        )

    offer_ids = [i for i in (bundle.compute_id, bundle.storage_id, bundle.transfer_id) if i]
    compute = storage = transfer_in = transfer_out = 0.0
    if bundle.compute_id:
        compute = component_cost(catalog.offer(bundle.compute_id), usage)
    if bundle.storage_id:
        storage = component_cost(catalog.offer(bundle.storage_id), usage)
    if bundle.transfer_id:
        offer = catalog.offer(bundle.transfer_id)
        transfer_in = tiered_cost(usage.data_upload, offer.inbound_tiers, offer.inbound_free_quota)
        transfer_out = tiered_cost(
            usage.data_download, offer.outbound_tiers, offer.outbound_free_quota
        )

    pre_total = compute + storage + transfer_in + transfer_out
    adjustment = promotion_adjustment(catalog, offer_ids, pre_total)

    def to_target(amount: float) -> float:
        return convert_currency(amount, table.base_code, target_currency, table)

    parts = [to_target(x) for x in (compute, storage, transfer_in, transfer_out, adjustment)]
    return CostBreakdown(
        compute=parts[0],
        storage=parts[1],
        transfer_in=parts[2],
        transfer_out=parts[3],
        promotion_adjustment=parts[4],
        total=sum(parts),
        currency=target_currency,
    )
