"""Bundle list rendering: one entry per combined service, JSON or XML.

Both renderings carry the same fields; XML wraps them as children of
``<Combined_service>`` elements under a ``<list>`` root. Scalars are written
with ``str()``, whose shortest round-trip float form matches the JSON
serialization exactly.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..catalog import ProviderCatalog
from ..recommend import Recommendation


def entry_dict(snapshot: ProviderCatalog, rec: Recommendation) -> dict:
    bundle = rec.bundle
    names = [snapshot.offer(i).name for i in bundle.key if i]
    region = snapshot.region_of_offer(bundle.compute_id)
    provider = snapshot.provider(region.provider_id)
    entry = {
        "name": " + ".join(names),
        "website": provider.website,
        "region_name": region.region_name,
        "compute_id": bundle.compute_id,
        "storage_id": bundle.storage_id,
        "transfer_id": bundle.transfer_id,
        "compute_cost": rec.breakdown.compute,
        "storage_cost": rec.breakdown.storage,
        "transfer_in_cost": rec.breakdown.transfer_in,
        "transfer_out_cost": rec.breakdown.transfer_out,
        "promotion_adjustment": rec.breakdown.promotion_adjustment,
        "total_cost": rec.breakdown.total,
        "currency": rec.breakdown.currency,
    }
    if rec.score is not None:
        entry["score"] = rec.score
    if bundle.criteria_values:
        entry["criteria"] = dict(sorted(bundle.criteria_values.items()))
    return entry


def _fill(parent: ET.Element, key: str, value) -> None:
    node = ET.SubElement(parent, key)
    if isinstance(value, dict):
        for sub_key, sub_value in value.items():
            _fill(node, sub_key, sub_value)
    else:
        node.text = str(value)


def render_xml(entries: list[dict]) -> str:
    root = ET.Element("list")
    for entry in entries:
        service = ET.SubElement(root, "Combined_service")
        for key, value in entry.items():
            _fill(service, key, value)
    return ET.tostring(root, encoding="unicode")
