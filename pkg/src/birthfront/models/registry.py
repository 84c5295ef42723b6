"""
Registry for rate models.

Inspired by SQLAlchemy's ``PluginLoader``.
"""

import importlib
import logging
from collections import defaultdict
from typing import Any, Dict, List, Optional, Type, cast

from pkg_resources import iter_entry_points

from birthfront.exceptions import ConfigurationError, InterfaceError
from birthfront.models.base import RateModel

_logger = logging.getLogger(__name__)


class ModelLoader:
    """
    Model registry, allowing new rate models to be registered.
    """

    def __init__(self):
        self.loaders = defaultdict(list)
        for entry_point in iter_entry_points("birthfront.model"):
            self.loaders[entry_point.name].append(entry_point.load)

    def load(self, name: str) -> Type[RateModel]:
        """
        Load a given entry point by its name.
        """
        for load in self.loaders[name]:
            try:
                return cast(Type[RateModel], load())
            except (ImportError, ModuleNotFoundError) as ex:
                _logger.warning("Couldn't load model %s", name)
                _logger.debug(ex)
                continue

        raise InterfaceError(f"Unable to load model {name}")

    def load_all(
        self,
        models: Optional[List[str]] = None,
    ) -> Dict[str, Type[RateModel]]:
        """
        Load all the models given a list of names.

        If the list is ``None`` everything is returned.
        """
        return {
            name: self.load(name)
            for name in self.loaders
            if models is None or name in models
        }

    def register(self, name: str, modulepath: str, classname: str) -> None:
        """
        Register a new model.
        """

        def load() -> Type[RateModel]:
            module = importlib.import_module(modulepath)
            if not hasattr(module, classname):
                raise ModuleNotFoundError(f"No model {classname} in {modulepath}")
            return cast(Type[RateModel], getattr(module, classname))

        self.loaders[name].append(load)

    def add(self, name: str, model: Type[RateModel]) -> None:
        """
        Add a model class directly.
        """
        self.loaders[name].append(lambda: model)

    def clear(self) -> None:
        """
        Remove all registered models.
        """
        self.loaders = defaultdict(list)

    def build(self, spec: Dict[str, Any]) -> RateModel:
        """
        Instantiate a model from the ``model:`` section of a config.
        """
        name = spec.get("name", "fec_est")
        model_class = self.load(name)
        try:
            model = model_class.from_config(spec)
        except (TypeError, ValueError) as ex:
            raise ConfigurationError(f"Invalid parameters for model {name}") from ex

        _logger.info("Built model %s", model.describe())
        return model


registry = ModelLoader()
