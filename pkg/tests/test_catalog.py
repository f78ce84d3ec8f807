import json

import pytest

from cloudselect.catalog import CatalogStore, load_catalog, validate_catalog
from cloudselect.errors import CatalogParseError, CatalogValidationError

from conftest import catalog_dict, make_catalog


def test_empty_document_yields_empty_catalog():
    catalog = load_catalog(json.dumps({"currency_table": {"base_code": "USD", "rates": {"USD": 1.0}}}))
    assert catalog.providers == ()
    assert catalog.compute_offers == ()
    assert catalog.storage_offers == ()
    assert catalog.transfer_offers == ()


def test_fixture_counts(small_catalog):
    assert len(small_catalog.providers) == 2
    assert len(small_catalog.regions) == 3
    offers = (
        len(small_catalog.compute_offers)
        + len(small_catalog.storage_offers)
        + len(small_catalog.transfer_offers)
    )
    assert offers == 4


def test_malformed_json_is_parse_error():
    with pytest.raises(CatalogParseError):
        load_catalog("{not json")


def test_missing_required_field_is_parse_error():
    doc = catalog_dict()
    del doc["providers"][0]["website"]
    with pytest.raises(CatalogParseError, match="website"):
        load_catalog(json.dumps(doc))


def test_dangling_region_reference_names_the_id():
    doc = catalog_dict()
    doc["storage_offers"][0]["region_id"] = "nowhere"
    with pytest.raises(CatalogValidationError) as excinfo:
        load_catalog(json.dumps(doc))
    violations = excinfo.value.violations
    assert any("nowhere" in v.rule and v.field == "region_id" for v in violations)


def test_valid_catalog_has_no_violations(small_catalog):
    assert validate_catalog(small_catalog) == []


def test_tier_gap_is_one_contiguity_violation():
    doc = catalog_dict()
    doc["storage_offers"][0]["tiers"] = [
        {"lower": 0, "upper": 10, "unit_price": 0.1},
        {"lower": 20, "upper": None, "unit_price": 0.05},
    ]
    with pytest.raises(CatalogValidationError) as excinfo:
        load_catalog(json.dumps(doc))
    contiguity = [v for v in excinfo.value.violations if "contiguous" in v.rule]
    assert len(contiguity) == 1


def test_negative_hourly_rate_violation():
    doc = catalog_dict()
    doc["compute_offers"][0]["hourly_rate"] = -0.5
    with pytest.raises(CatalogValidationError) as excinfo:
        load_catalog(json.dumps(doc))
    assert any(v.field == "hourly_rate" for v in excinfo.value.violations)


def test_continent_outside_closed_set_rejected():
    doc = catalog_dict()
    doc["regions"][0]["continent"] = "Atlantis"
    with pytest.raises(CatalogValidationError) as excinfo:
        load_catalog(json.dumps(doc))
    assert any(v.field == "continent" for v in excinfo.value.violations)


def test_referential_integrity_chains_to_provider():
    catalog = make_catalog()
    for offer in catalog.compute_offers + catalog.storage_offers + catalog.transfer_offers:
        region = catalog.region(offer.region_id)
        provider = catalog.provider(region.provider_id)
        assert provider.website


def test_snapshot_ids_increase():
    first = make_catalog()
    second = make_catalog()
    assert second.snapshot_id > first.snapshot_id


def test_store_swap_is_visible_and_snapshot_stable():
    store = CatalogStore(make_catalog())
    before = store.current()
    replacement = make_catalog()
    store.swap(replacement)
    assert store.current() is replacement
    # the old snapshot is untouched by the swap
    assert before.snapshot_id != replacement.snapshot_id
    assert before.providers == make_catalog().providers


def test_duplicate_provider_id_flagged():
    doc = catalog_dict()
    doc["providers"].append(dict(doc["providers"][0]))
    with pytest.raises(CatalogValidationError) as excinfo:
        load_catalog(json.dumps(doc))
    assert any("duplicate" in v.rule for v in excinfo.value.violations)


def test_promotion_value_bounds():
    doc = catalog_dict()
    doc["promotions"] = [{"offer_id": "alpha-s1", "kind": "percent_discount", "value": 150}]
    with pytest.raises(CatalogValidationError) as excinfo:
        load_catalog(json.dumps(doc))
    assert any("percent" in v.rule for v in excinfo.value.violations)


def test_shipped_fixtures_match_schema():
    jsonschema = pytest.importorskip("jsonschema")
    from conftest import FIXTURES, REPO_ROOT

    schema = json.loads((REPO_ROOT / "schema" / "catalog.schema.json").read_text())
    for name in ("catalog_small.json", "catalog_default.json"):
        document = json.loads((FIXTURES / name).read_text())
        jsonschema.validate(document, schema)
