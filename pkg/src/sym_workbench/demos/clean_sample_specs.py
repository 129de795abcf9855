import os
import shutil

from sym_workbench.demos.populate_sample_specs import RUNNING_SPEC_PATH, SAMPLE_DIR, SPLIT_SPEC_PATH, TRIVIAL_SPEC_PATH

OUTPUT_DIR = "./out"


def clean_sample_specs():
    # Remove the spec files if they exist
    for path in [RUNNING_SPEC_PATH, TRIVIAL_SPEC_PATH, SPLIT_SPEC_PATH]:
        if os.path.exists(path):
            os.remove(path)
            print(f"Removed spec file: {path}")
    # Remove the spec directory if it is empty
    if os.path.exists(SAMPLE_DIR) and not os.listdir(SAMPLE_DIR):
        os.rmdir(SAMPLE_DIR)
        print(f"Removed empty spec directory: {SAMPLE_DIR}")
    data_dir = os.path.dirname(os.path.normpath(SAMPLE_DIR))
    if os.path.exists(data_dir) and not os.listdir(data_dir):
        os.rmdir(data_dir)
        print(f"Removed empty top-level data directory: {data_dir}")
    # Remove the default CLI output folder
    if os.path.exists(OUTPUT_DIR):
        shutil.rmtree(OUTPUT_DIR)
        print(f"Removed output folder: {OUTPUT_DIR}")


if __name__ == "__main__":
    clean_sample_specs()
