"""
API Client for the SWIPT solver service.

This module handles all HTTP communication with the solver service,
following the Single Responsibility Principle.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

import requests

logger = logging.getLogger(__name__)


class APIClientInterface(ABC):
    """Interface for API clients following the Interface Segregation Principle."""

    @abstractmethod
    def check_server_status(self) -> bool:
        """Check if the solver service is running."""
        pass

    @abstractmethod
    def list_solvers(self) -> Dict[str, Any]:
        """Get the algorithms and selection strategies the service offers."""
        pass

    @abstractmethod
    def solve(self, instance: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        """Solve one instance; ``None`` when the request failed."""
        pass


class BaseAPIClient(APIClientInterface):
    """Base API client with common functionality."""

    def __init__(self, base_url: str = "http://localhost:8000", timeout: int = 120):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def check_server_status(self) -> bool:
        try:
            response = requests.get(f"{self.base_url}/health", timeout=5)
            return response.status_code == 200
        except requests.exceptions.RequestException:
            return False

    def list_solvers(self) -> Dict[str, Any]:
        try:
            response = requests.get(f"{self.base_url}/solvers", timeout=10)
            response.raise_for_status()
            return response.json()
        except requests.exceptions.RequestException as e:
            self._handle_request_errors(e)
            return self._get_fallback_solvers()

    def _get_fallback_solvers(self) -> Dict[str, Any]:
        """Solvers every service version offers."""
        return {
            "algorithms": ["dm_cvx", "jeapa", "moo_lc"],
            "selection_strategies": ["fixed_full", "exhaustive", "frobenius"],
        }

    def _handle_api_response(self, response_data: Any) -> Optional[Dict[str, Any]]:
        if isinstance(response_data, dict) and "output" in response_data:
            return response_data["output"]
        logger.warning("unexpected response shape: %r", response_data)
        return None

    def _post(self, endpoint: str, body: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        try:
            response = requests.post(f"{self.base_url}{endpoint}", json={"input": body}, timeout=self.timeout)
            response.raise_for_status()
            return self._handle_api_response(response.json())
        except requests.exceptions.RequestException as e:
            self._handle_request_errors(e)
            return None

    def _handle_request_errors(self, e: Exception) -> None:
        """Log common request errors."""
        if isinstance(e, requests.exceptions.ConnectionError):
            logger.error("Connection failed. Is the solver service running on %s?", self.base_url)
        elif isinstance(e, requests.exceptions.Timeout):
            logger.error("Request timed out after %s s; large exhaustive searches may need a longer timeout",
                         self.timeout)
        elif isinstance(e, requests.exceptions.HTTPError) and e.response is not None:
            try:
                detail = e.response.json().get("detail", "Unknown error")
            except ValueError:
                detail = e.response.text
            logger.error("Service error %s: %s", e.response.status_code, detail)
        else:
            logger.error("Request failed: %s", e)


class SolverServiceClient(BaseAPIClient):
    """Client for the ``/solve`` and ``/select`` endpoints."""

    def solve(self, instance: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        return self._post("/solve/invoke", instance)

    def select(self, instance: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        return self._post("/select/invoke", instance)


class APIClientFactory:
    """Factory class for creating API clients following the Factory Pattern."""

    @staticmethod
    def create_client(client_type: str = "solver", base_url: str = "http://localhost:8000",
                      timeout: int = 120) -> APIClientInterface:
        if client_type.lower() == "solver":
            return SolverServiceClient(base_url, timeout)
        raise ValueError(f"Unknown client type: {client_type}")
