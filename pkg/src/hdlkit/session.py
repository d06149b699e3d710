"""Session-wide bookkeeping: the shadow register of created objects.

Every framework object (node, entity, interface instance, handler,
monomorphized class) registers itself here when created.  Registration order
is deterministic for a given program and drives stable naming, stable VCD
output and stable VHDL emission.  The session also tracks the current phase
(elaboration vs simulation), the architecture scope stack and the default
storage class for new nodes.
"""

ELABORATION = "elaboration"
SIMULATION = "simulation"


class ElaborationError(Exception):
    pass


class Session:
    def __init__(self):
        self.objects = []          # registration order, all framework objects
        self.next_id = 0
        self.phase = ELABORATION
        self.arch_stack = []       # ArchScope entries while architectures run
        self.storage_default = ["signal"]
        self.processes = []        # every ProcessBlock, ascending id
        self.clock_drivers = []    # (node, period) pairs driven by the scheduler
        self.iface_monomorphs = {}   # MonomorphKey -> concrete interface class
        self.handler_monomorphs = {}  # MonomorphKey -> concrete handler class
        self.data_monomorphs = {}  # MonomorphKey -> concrete data container class
        self.connections = []      # (src endpoint, dst endpoint) interface edges
        self.pending_nets = []     # nets with uncommitted scheduled values
        self.sim_now = None        # current tick while simulating
        self.scheduler = None
        self.frozen = False
        # overridable process-body executor; tests may install a statement
        # tree interpreter here to differential-test the captured trees
        self.process_executor = None

    def register(self, obj):
        if self.frozen:
            raise ElaborationError(
                "cannot create framework objects after the design is frozen")
        oid = self.next_id
        self.next_id += 1
        self.objects.append(obj)
        return oid

    def current_entity(self):
        return self.arch_stack[-1].entity if self.arch_stack else None


class ArchScope:
    def __init__(self, entity, start_index):
        self.entity = entity
        self.start_index = start_index
        self.finalized = False


_session = Session()


def current():
    return _session


def new_session():
    """Reset the shadow register.  Used by tests and at CLI startup."""
    global _session
    _session = Session()
    return _session
