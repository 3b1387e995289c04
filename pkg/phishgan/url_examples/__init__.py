"""This file provides a function to load the bundled example URL files."""

import os

from phishgan.urls.dataset import load_csv

DIR_PATH = os.path.dirname(os.path.abspath(__file__))


def parse(file_name):
    """Load a bundled `url,label` example file."""
    return load_csv(os.path.join(DIR_PATH, file_name))


sample = parse("sample.csv")
