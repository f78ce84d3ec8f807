"""Random catalog builders shared by the join and GA equivalence tests."""

import json
import math
import random

from cloudselect.catalog import load_catalog

CONTINENT_CHOICES = (
    "North America",
    "South America",
    "Europe",
    "Asia",
    "Africa",
    "Australia",
    "Antarctica",
)


def random_tiers(rng: random.Random):
    boundaries = sorted(rng.sample(range(1, 2000), rng.randint(0, 2)))
    tiers = []
    lower = 0
    for upper in boundaries:
        tiers.append({"lower": lower, "upper": upper, "unit_price": round(rng.uniform(0, 0.3), 4)})
        lower = upper
    tiers.append({"lower": lower, "upper": None, "unit_price": round(rng.uniform(0, 0.3), 4)})
    return tiers


def random_catalog_document(
    rng: random.Random,
    n_providers=3,
    n_regions=4,
    n_compute=5,
    n_storage=5,
    n_transfer=5,
):
    providers = [
        {"id": f"p{i}", "name": f"Provider {i}", "website": f"https://p{i}.example.com/"}
        for i in range(n_providers)
    ]
    regions = [
        {
            "id": f"r{i}",
            "provider_id": f"p{rng.randrange(n_providers)}",
            "region_name": f"Region {i}",
            "continent": rng.choice(CONTINENT_CHOICES),
        }
        for i in range(n_regions)
    ]
    compute = [
        {
            "id": f"c{i}",
            "region_id": f"r{rng.randrange(n_regions)}",
            "name": f"Compute {i}",
            "cores": rng.randint(1, 16),
            "threads_per_core_or_vm": rng.randint(1, 4),
            "memory": rng.choice([2, 4, 8, 16, 32, 64]),
            "local_storage": rng.choice([0, 40, 80]),
            "os_family": rng.choice(["linux", "windows"]),
            "hourly_rate": round(rng.uniform(0.01, 1.2), 4),
            "relative_speed": round(rng.uniform(0.5, 3.0), 3),
        }
        for i in range(n_compute)
    ]
    storage = [
        {
            "id": f"s{i}",
            "region_id": f"r{rng.randrange(n_regions)}",
            "name": f"Storage {i}",
            "tiers": random_tiers(rng),
            "free_quota": rng.choice([0, 0, 1, 10]),
        }
        for i in range(n_storage)
    ]
    transfer = [
        {
            "id": f"t{i}",
            "region_id": f"r{rng.randrange(n_regions)}",
            "name": f"Transfer {i}",
            "inbound_tiers": random_tiers(rng),
            "outbound_tiers": random_tiers(rng),
            "inbound_free_quota": rng.choice([0, 0, 1]),
            "outbound_free_quota": rng.choice([0, 0, 1]),
        }
        for i in range(n_transfer)
    ]
    return {
        "providers": providers,
        "regions": regions,
        "compute_offers": compute,
        "storage_offers": storage,
        "transfer_offers": transfer,
        "promotions": [],
        "currency_table": {"base_code": "USD", "rates": {"USD": 1.0, "AUD": 1.5}},
    }


def random_catalog(rng: random.Random, **kwargs):
    return load_catalog(json.dumps(random_catalog_document(rng, **kwargs)))


def complete_region_catalog(rng: random.Random, n_regions=2, per_region=(3, 4, 4)):
    """Catalog where every region stocks all three offer kinds.

    Guarantees a non-empty same-region join; used by the GA equivalence runs.
    """
    n_compute, n_storage, n_transfer = per_region
    doc = random_catalog_document(rng, n_providers=n_regions, n_regions=0,
                                  n_compute=0, n_storage=0, n_transfer=0)
    doc["regions"] = [
        {
            "id": f"r{i}",
            "provider_id": f"p{i}",
            "region_name": f"Region {i}",
            "continent": rng.choice(CONTINENT_CHOICES),
        }
        for i in range(n_regions)
    ]
    idx = 0
    for i in range(n_regions):
        for _ in range(n_compute):
            doc["compute_offers"].append(
                {
                    "id": f"c{idx}",
                    "region_id": f"r{i}",
                    "name": f"Compute {idx}",
                    "cores": rng.randint(1, 16),
                    "threads_per_core_or_vm": rng.randint(1, 4),
                    "memory": rng.choice([2, 4, 8, 16, 32, 64]),
                    "local_storage": 0,
                    "os_family": "linux",
                    "hourly_rate": round(rng.uniform(0.01, 1.2), 4),
                    "relative_speed": round(rng.uniform(0.5, 3.0), 3),
                }
            )
            idx += 1
        for _ in range(n_storage):
            doc["storage_offers"].append(
                {
                    "id": f"s{idx}",
                    "region_id": f"r{i}",
                    "name": f"Storage {idx}",
                    "tiers": random_tiers(rng),
                    "free_quota": 0,
                }
            )
            idx += 1
        for _ in range(n_transfer):
            doc["transfer_offers"].append(
                {
                    "id": f"t{idx}",
                    "region_id": f"r{i}",
                    "name": f"Transfer {idx}",
                    "inbound_tiers": random_tiers(rng),
                    "outbound_tiers": random_tiers(rng),
                    "inbound_free_quota": 0,
                    "outbound_free_quota": 0,
                }
            )
            idx += 1
    return load_catalog(json.dumps(doc))


def nested_loop_join(snapshot, candidates, policy):
    """Reference join: scan the full Cartesian product, count predicate checks."""
    results = []
    checks = 0
    for c in candidates.compute_candidates:
        for s in candidates.storage_candidates:
            for t in candidates.transfer_candidates:
                checks += 1
                if policy == "none":
                    ok = True
                elif policy == "same-region":
                    regions = {snapshot.offer(x).region_id for x in (c, s, t)}
                    ok = len(regions) == 1
                else:
                    providers = {
                        snapshot.region(snapshot.offer(x).region_id).provider_id
                        for x in (c, s, t)
                    }
                    ok = len(providers) == 1
                if ok:
                    results.append((c, s, t))
    return results, checks
