import json
import os

SAMPLE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "../../../data/specs")
RUNNING_SPEC_PATH = os.path.join(SAMPLE_DIR, "running_instance.json")
TRIVIAL_SPEC_PATH = os.path.join(SAMPLE_DIR, "rank_one.json")
SPLIT_SPEC_PATH = os.path.join(SAMPLE_DIR, "split_slopes.json")


def _write(path: str, payload: dict) -> str:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def create_running_spec(path: str = RUNNING_SPEC_PATH) -> str:
    print(f"Creating the running instance spec at: {path}")
    payload = {
        "ring": {"p": 3, "r": 5, "N": 5, "T": 9, "D": 3},
        "spec": {"b": [1], "z": 2, "a": "2", "r": 5},
    }
    _write(path, payload)
    print("b=[1], z=2, a=2: M = Sym^1 N twisted, special slopes {2, 2}")
    return path


def create_rank_one_spec(path: str = TRIVIAL_SPEC_PATH) -> str:
    print(f"Creating the rank one spec at: {path}")
    payload = {
        "ring": {"p": 3, "r": 3, "N": 5, "T": 6},
        "spec": {"b": [0], "z": 2, "a": "1", "r": 3},
    }
    _write(path, payload)
    print("b=[0]: M is the twist N_1 itself")
    return path


def create_split_spec(path: str = SPLIT_SPEC_PATH) -> str:
    print(f"Creating the split slope spec at: {path}")
    payload = {
        "ring": {"p": 3, "r": 5, "N": 5, "T": 9, "D": 3},
        "spec": {"b": [1], "z": 2, "a": "2", "r": 5, "slope_pair": ["0", "2"]},
    }
    _write(path, payload)
    print("N realizes the slopes {0, 2} on the special fibre")
    return path


def populate_sample_specs() -> list[str]:
    paths = [create_running_spec(), create_rank_one_spec(), create_split_spec()]
    print(f"\nWrote {len(paths)} spec files to {os.path.normpath(SAMPLE_DIR)}")
    return paths


if __name__ == "__main__":
    populate_sample_specs()
