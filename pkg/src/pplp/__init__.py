"""Linear programming over data split among mutually distrustful parties.

Parties holding additive shares of an LP disguise it with secret monomial
transformations under additively homomorphic encryption, let one party solve
the disguised problem, and jointly map the solution back.
"""
from pplp.crypto import KeyPair, PrivateKey, PublicKey, keygen
from pplp.linalg import MonomialMatrix
from pplp.solver import LpProblem, LpSolution, Status, simplex_solve

__version__ = "0.1.0"

__all__ = ["KeyPair", "PrivateKey", "PublicKey", "keygen", "MonomialMatrix", "LpProblem",
           "LpSolution", "Status", "simplex_solve", "__version__"]
