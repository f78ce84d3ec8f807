"""Request and response bodies for the JSON endpoints."""

from __future__ import annotations

from pydantic import BaseModel, Field


class SelectionIn(BaseModel):
    session: str = Field(min_length=1)
    compute_id: str = ""
    storage_id: str = ""
    transfer_id: str = ""
    event: str
    timestamp: str | None = None


class SelectionAck(BaseModel):
    status: str  # recorded | duplicate
    event: str
    offer_ids: list[str]


class OfferCounts(BaseModel):
    recommended: int
    selected: int


class PopularityOut(BaseModel):
    offers: dict[str, OfferCounts]


class CatalogInfo(BaseModel):
    snapshot_id: int
    providers: int
    regions: int
    compute_offers: int
    storage_offers: int
    transfer_offers: int


class ConfigOut(BaseModel):
    continents: list[str]
    vague_levels: dict[str, dict[str, float]]
    criteria: dict[str, dict[str, str]]
    currencies: list[str]
    compatibility_policy: str
    cr_threshold: float
