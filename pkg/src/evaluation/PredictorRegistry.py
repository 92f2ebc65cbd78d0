from typing import Callable, Dict, Optional

from src.evaluation.comparison import compare_models
from src.evaluation.metrics import model_predictor
from src.shared.errors import ContractError
from src.shared.logger_manager import LoggerMixin


class PredictorRegistry(LoggerMixin):
    def __init__(self):
        """
        Initialize an empty registry of named force predictors.
        """
        super().__init__()
        self.predictors: Dict[str, Callable] = {}
        self.reference: Optional[str] = None

    def register_predictor(self, name: str, predictor: Callable, reference: bool = False) -> None:
        """
        Register a (d, h, v) -> force callable under a name. The first one registered is the
        reference unless another is marked.
        """
        if name in self.predictors:
            self.log_error(f"predictor '{name}' is already registered")
            raise ContractError(f"predictor '{name}' is already registered")
        self.predictors[name] = predictor
        if reference or self.reference is None:
            self.reference = name
        self.log_debugger(f"Registered predictor: {name}")

    def register_model(self, name, model, reference=False):
        self.register_predictor(name, model_predictor(model), reference)

    def deregister_predictor(self, name: str) -> None:
        """
        Remove a predictor by name.
        """
        if name in self.predictors:
            del self.predictors[name]
            if self.reference == name:
                self.reference = next(iter(self.predictors), None)
            self.log_debugger(f"Deregistered predictor: {name}")

    def get_all_predictors(self) -> Dict[str, Callable]:
        return self.predictors

    def compare(self, test, max_workers=None):
        """Run compare_models over every registered predictor in registration order."""
        kwargs = {} if max_workers is None else {"max_workers": max_workers}
        predictors = self.get_all_predictors()
        table = compare_models(list(predictors.items()), test, self.reference, **kwargs)
        self.log_info(f"compared {len(predictors)} predictors on {len(test)} samples")
        return table
