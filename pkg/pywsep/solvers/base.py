"""Base classes and helpers shared by the resonance solvers."""

import logging
from abc import ABCMeta, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from warnings import warn

import wrapt

LOGGER = logging.getLogger(__name__)


@wrapt.decorator
def _loopable(wrapped, instance, args, kwargs):
    """Decorate solve() methods of Solver classes.

    Designed to accept a list of parameter points in place of a single one. Each point is solved
    independently by the instance's ``_solve`` method, fanned out over ``instance.n_jobs``
    threads, and the results are stored in order.
    """
    params = args[0] if args else kwargs.pop("params")
    if not isinstance(params, (list, tuple)):
        return wrapped(params, *args[1:], **kwargs)

    n_iter = len(params)
    n_jobs = max(1, getattr(instance, "n_jobs", 1))
    if n_iter > 100 and n_jobs == 1:
        warn(
            "Input contains {} parameter points. Each requires a dense eigensolve, "
            "which may be slow; consider raising n_jobs.".format(n_iter)
        )

    LOGGER.debug("Solving %d parameter points on %d threads.", n_iter, n_jobs)
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        results = list(pool.map(lambda p: instance._solve(p, *args[1:], **kwargs), params))

    instance.result_ = results
    return instance


class BaseSolver(metaclass=ABCMeta):
    """A base class for Solvers."""

    @abstractmethod
    def _solve(self, params, *args, **kwargs):
        """Solve a single parameter point and return its result."""
        pass

    @_loopable
    def solve(self, params, *args, **kwargs):
        """Solve one parameter point, or a list of them.

        Parameters
        ----------
        params : :obj:`~pywsep.lattice.LatticeParams` or :obj:`list`
            Parameter point(s).
        *args, **kwargs
            Passed on to the solver.

        Returns
        -------
        self
        """
        self.result_ = self._solve(params, *args, **kwargs)
        return self

    def summary(self):
        """Return the result of the last solve() call.

        Returns
        -------
        result or :obj:`list` of results
        """
        if not hasattr(self, "result_"):
            name = self.__class__.__name__
            raise ValueError(
                "This {} instance hasn't been solved yet. Please "
                "call solve() before summary().".format(name)
            )

        return self.result_
