import json
from pathlib import Path

import pytest

from cloudselect.catalog import load_catalog

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


def catalog_dict(**overrides):
    """A small well-formed catalog document as a mutable dict."""
    doc = {
        "providers": [
            {"id": "alpha", "name": "Alpha Cloud", "website": "https://alpha.example.com/"},
            {"id": "beta", "name": "Beta Services", "website": "https://beta.example.com/"},
        ],
        "regions": [
            {"id": "alpha-us", "provider_id": "alpha", "region_name": "Ohio",
             "continent": "North America", "country": "United States"},
            {"id": "alpha-eu", "provider_id": "alpha", "region_name": "Dublin",
             "continent": "Europe", "country": "Ireland"},
            {"id": "beta-ap", "provider_id": "beta", "region_name": "Tokyo",
             "continent": "Asia", "country": "Japan"},
        ],
        "compute_offers": [
            {"id": "alpha-c1", "region_id": "alpha-us", "name": "Basic VM", "cores": 2,
             "threads_per_core_or_vm": 2, "memory": 4, "local_storage": 40,
             "os_family": "linux", "hourly_rate": 0.08, "relative_speed": 1.0},
            {"id": "beta-c1", "region_id": "beta-ap", "name": "Value VM", "cores": 4,
             "threads_per_core_or_vm": 2, "memory": 8, "local_storage": 80,
             "os_family": "linux", "hourly_rate": 0.15, "relative_speed": 1.4},
        ],
        "storage_offers": [
            {"id": "alpha-s1", "region_id": "alpha-us", "name": "Bucket storage",
             "tiers": [{"lower": 0, "upper": None, "unit_price": 0.10}], "free_quota": 0},
        ],
        "transfer_offers": [
            {"id": "alpha-t1", "region_id": "alpha-us", "name": "Internet egress",
             "inbound_tiers": [{"lower": 0, "upper": None, "unit_price": 0.0}],
             "outbound_tiers": [{"lower": 0, "upper": None, "unit_price": 0.12}],
             "inbound_free_quota": 0, "outbound_free_quota": 1},
        ],
        "promotions": [],
        "currency_table": {"base_code": "USD", "rates": {"USD": 1.0, "AUD": 1.5, "EUR": 0.92}},
    }
    doc.update(overrides)
    return doc


def make_catalog(**overrides):
    return load_catalog(json.dumps(catalog_dict(**overrides)))


@pytest.fixture
def small_catalog():
    return load_catalog((FIXTURES / "catalog_small.json").read_text())


@pytest.fixture
def default_catalog():
    return load_catalog((FIXTURES / "catalog_default.json").read_text())
