import json
import xml.etree.ElementTree as ET

import pytest
from fastapi.testclient import TestClient

from cloudselect.config import EngineConfig
from cloudselect.history import HistoryStore
from cloudselect.service import create_app

from conftest import FIXTURES, make_catalog

GOLDEN_QUERY = (
    "/api/cost/combined?media_type=xml&currency=AUD&storage=500&duration=31"
    "&data_upload_size=15&data_download_size=30"
    "&continent=North%20America,South%20America,Antarctica,Africa,Europe,Asia,Australia"
)


@pytest.fixture
def client(default_catalog):
    config = EngineConfig(history_path=None)
    app = create_app(config=config, catalog=default_catalog, history=HistoryStore())
    return TestClient(app)


def fresh_client(default_catalog):
    config = EngineConfig(history_path=None)
    app = create_app(config=config, catalog=default_catalog, history=HistoryStore())
    return TestClient(app)


class TestCombinedCostGolden:
    def test_golden_xml_request(self, client):
        response = client.get(GOLDEN_QUERY)
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("application/xml")
        root = ET.fromstring(response.text)
        assert root.tag == "list"
        services = root.findall("Combined_service")
        assert services, "expected at least one combined service"
        for service in services:
            for field in ("name", "website", "region_name"):
                node = service.find(field)
                assert node is not None and node.text
            assert service.find("total_cost") is not None
            assert service.findtext("currency") == "AUD"

    @pytest.mark.parametrize(
        "mutation",
        [
            ("media_type", "csv"),
            ("currency", "ZZZ"),
            ("storage", "-5"),
            ("duration", "32"),
            ("data_upload_size", "-1"),
            ("data_download_size", "-2"),
        ],
    )
    def test_each_documented_parameter_rejected_individually(self, client, mutation):
        name, bad_value = mutation
        params = {
            "media_type": "xml",
            "currency": "AUD",
            "storage": "500",
            "duration": "31",
            "data_upload_size": "15",
            "data_download_size": "30",
            "continent": "Europe",
        }
        params[name] = bad_value
        response = client.get("/api/cost/combined", params=params)
        assert response.status_code == 400
        assert name in response.text

    def test_unknown_continent_rejected(self, client):
        response = client.get("/api/cost/combined", params={"continent": "Atlantis",
                                                            "storage": "1",
                                                            "data_download_size": "1"})
        assert response.status_code == 400
        assert "continent" in response.text

    def test_unparseable_number_is_400_not_422(self, client):
        response = client.get("/api/cost/combined", params={"storage": "lots",
                                                            "data_download_size": "1"})
        assert response.status_code == 400
        assert "storage" in response.text

    def test_missing_storage_dimension_names_parameter(self, client):
        response = client.get("/api/cost/combined", params={"data_download_size": "1"})
        assert response.status_code == 400
        assert "storage" in response.text

    def test_vague_storage_fills_dimension(self, client):
        response = client.get(
            "/api/cost/combined",
            params={"vague_storage": "small", "data_download_size": "1"},
        )
        assert response.status_code == 200
        assert response.json()


class TestCombinedCostBehavior:
    def test_json_ranked_by_total_ascending(self, client):
        response = client.get(
            "/api/cost/combined",
            params={"storage": "500", "data_download_size": "30", "data_upload_size": "15"},
        )
        entries = response.json()
        totals = [e["total_cost"] for e in entries]
        assert totals == sorted(totals)

    def test_xml_and_json_information_equivalent(self, client):
        params = {"currency": "EUR", "storage": "500", "data_download_size": "30"}
        json_entries = client.get("/api/cost/combined", params=params).json()
        xml_text = client.get(
            "/api/cost/combined", params={**params, "media_type": "xml"}
        ).text
        root = ET.fromstring(xml_text)
        xml_entries = []
        for service in root.findall("Combined_service"):
            entry = {}
            for child in service:
                if len(child):  # nested criteria block
                    entry[child.tag] = {sub.tag: float(sub.text) for sub in child}
                else:
                    entry[child.tag] = child.text
            xml_entries.append(entry)
        assert len(xml_entries) == len(json_entries)
        for xml_entry, json_entry in zip(xml_entries, json_entries):
            assert set(xml_entry) == set(json_entry)
            for key, json_value in json_entry.items():
                if isinstance(json_value, float):
                    assert float(xml_entry[key]) == json_value
                elif isinstance(json_value, dict):
                    assert xml_entry[key] == json_value
                else:
                    assert xml_entry[key] == str(json_value)

    def test_response_deterministic_on_fresh_state(self, default_catalog):
        bodies = []
        for _ in range(2):
            client = fresh_client(default_catalog)
            response = client.get(GOLDEN_QUERY)
            bodies.append(response.content)
        assert bodies[0] == bodies[1]

    def test_recommended_events_recorded(self, client):
        response = client.get(
            "/api/cost/combined",
            params={"storage": "1", "data_download_size": "1", "continent": "Europe"},
        )
        entries = response.json()
        assert entries
        popularity = client.get("/api/history/popularity").json()["offers"]
        for entry in entries:
            for key in ("compute_id", "storage_id", "transfer_id"):
                assert popularity[entry[key]]["recommended"] >= 1

    def test_empty_result_is_valid(self, client):
        response = client.get(
            "/api/cost/combined",
            params={"storage": "1", "data_download_size": "1", "min_cores": "512"},
        )
        assert response.status_code == 200
        assert response.json() == []

    def test_criteria_with_pairwise_runs_optimizer(self, client):
        response = client.get(
            "/api/cost/combined",
            params={
                "storage": "100",
                "data_download_size": "10",
                "criteria": "total_cost,memory",
                "pairwise": "1,3;1/3,1",
                "seed": "5",
            },
        )
        assert response.status_code == 200
        entries = response.json()
        assert entries
        scores = [e["score"] for e in entries]
        assert scores == sorted(scores, reverse=True)
        assert all("criteria" in e for e in entries)

    def test_inconsistent_pairwise_rejected(self, client):
        response = client.get(
            "/api/cost/combined",
            params={
                "storage": "100",
                "data_download_size": "10",
                "criteria": "total_cost,memory,relative_speed",
                "pairwise": "1,9,0.1111111111111111;0.1111111111111111,1,9;9,0.1111111111111111,1",
            },
        )
        assert response.status_code == 400
        assert "revise" in response.text

    def test_unknown_criterion_named(self, client):
        response = client.get(
            "/api/cost/combined",
            params={"storage": "1", "data_download_size": "1", "criteria": "karma"},
        )
        assert response.status_code == 400
        assert "criteria" in response.text


class TestHistoryEndpoints:
    def selection_body(self, **kw):
        body = {
            "session": "ui-1",
            "compute_id": "nimbus-c1",
            "storage_id": "nimbus-s1",
            "transfer_id": "nimbus-t1",
            "event": "selected",
            "timestamp": "2026-02-01T00:00:00Z",
        }
        body.update(kw)
        return body

    def test_selection_round_trip(self, client):
        response = client.post("/api/history/selection", json=self.selection_body())
        assert response.status_code == 200
        assert response.json()["status"] == "recorded"
        popularity = client.get(
            "/api/history/popularity", params={"offer_ids": "nimbus-c1"}
        ).json()
        assert popularity["offers"]["nimbus-c1"]["selected"] == 1

    def test_replay_is_idempotent(self, client):
        client.post("/api/history/selection", json=self.selection_body())
        response = client.post("/api/history/selection", json=self.selection_body())
        assert response.json()["status"] == "duplicate"
        popularity = client.get(
            "/api/history/popularity", params={"offer_ids": "nimbus-c1"}
        ).json()
        assert popularity["offers"]["nimbus-c1"]["selected"] == 1

    def test_unknown_offer_rejected(self, client):
        response = client.post(
            "/api/history/selection", json=self.selection_body(compute_id="ghost")
        )
        assert response.status_code == 400

    def test_unknown_event_rejected(self, client):
        response = client.post(
            "/api/history/selection", json=self.selection_body(event="viewed")
        )
        assert response.status_code == 400

    def test_popularity_for_unseen_offer_is_zero(self, client):
        popularity = client.get(
            "/api/history/popularity", params={"offer_ids": "nimbus-c2"}
        ).json()
        assert popularity["offers"]["nimbus-c2"] == {"recommended": 0, "selected": 0}


class TestMetaEndpoints:
    def test_catalog_info(self, client):
        info = client.get("/api/catalog/info").json()
        assert info["providers"] == 3
        assert info["compute_offers"] == 7

    def test_config_exposes_vague_mapping(self, client):
        config = client.get("/api/config").json()
        assert config["vague_levels"]["storage"]["large"] == 10000.0
        assert "AUD" in config["currencies"]
        assert config["compatibility_policy"] == "same-region"
