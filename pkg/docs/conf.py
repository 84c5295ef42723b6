"""
Sphinx configuration for the birthfront documentation.
"""
import inspect
import os
import shutil
import sys

__location__ = os.path.join(
    os.getcwd(),
    os.path.dirname(inspect.getfile(inspect.currentframe())),
)

sys.path.insert(0, os.path.join(__location__, "../src"))

# regenerate the API pages on every build, since Read the Docs doesn't run
# sphinx-apidoc on its own
from sphinx.ext import apidoc  # noqa: E402

output_dir = os.path.join(__location__, "api")
module_dir = os.path.join(__location__, "../src/birthfront")
shutil.rmtree(output_dir, ignore_errors=True)
try:
    apidoc.main(["--implicit-namespaces", "-f", "-o", output_dir, module_dir])
except Exception as ex:  # pylint: disable=broad-except
    print(f"Running `sphinx-apidoc` failed!\n{ex}")

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx.ext.doctest",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
]

source_suffix = ".rst"
master_doc = "index"

project = "birthfront"
copyright = "2022, the birthfront developers"  # pylint: disable=redefined-builtin

try:
    from birthfront import __version__ as version
except ImportError:
    version = ""
release = version

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store", ".venv"]
pygments_style = "sphinx"

html_theme = "alabaster"
html_theme_options = {"sidebar_width": "300px", "page_width": "1200px"}
htmlhelp_basename = "birthfront-doc"

latex_documents = [
    (
        "index",
        "user_guide.tex",
        "birthfront Documentation",
        "the birthfront developers",
        "manual",
    ),
]

python_version = ".".join(map(str, sys.version_info[0:2]))
intersphinx_mapping = {
    "python": ("https://docs.python.org/" + python_version, None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/reference", None),
}
