from twinproof.errors import *
from twinproof.annotations import *
from twinproof.immutability import *
from twinproof.config import *
from twinproof.logging import *
from twinproof.tools import *
from twinproof.testing import *
from twinproof.qstate import *
from twinproof.graphs import *
from twinproof.protocol3col import *
from twinproof.adversary import *
from twinproof.lemmas import *
from twinproof.circuits import *
from twinproof.certificates import *
from twinproof.cli import *


__all__ = tuple(name for name in dir() if not name.startswith('__'))
