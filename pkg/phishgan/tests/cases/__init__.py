"""Named test cases shared by the test modules.

Each YAML file holds a list of cases with a `name`, an `input` and an
`output` mapping, and optionally an `absolute_error_margin`.
"""

import os

import pytest
import yaml

DIR_PATH = os.path.dirname(os.path.abspath(__file__))


def load_cases(file_name, section=None):
    """Cases of one file as `pytest.param`s named after each case.

    With `section`, only the cases whose `section` key matches are returned.
    """
    with open(os.path.join(DIR_PATH, file_name), encoding="utf-8") as file:
        cases = yaml.safe_load(file)
    return [
        pytest.param(case, id=case["name"])
        for case in cases
        if section is None or case.get("section") == section
    ]
