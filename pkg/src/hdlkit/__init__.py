"""hdlkit: describe synchronous hardware as Python objects, simulate it with
delta-cycle semantics, and transpile the elaborated design to VHDL."""

from .types import (TypeDescriptor, Value, U, HdlTypeError, HdlRangeError,
                    logic_type, vector_type, integer_type, boolean_type,
                    record_type, array_type)
from .signals import (Node, OptionalNode, vec, bit, intsig, boolsig, optional,
                      variable, constant, drive, reset, v_switch, v_case,
                      DriveError, SingleDriverError,
                      SIGNAL, VARIABLE, CONSTANT)
from .session import new_session, current as current_session, ElaborationError
from .entity import (Entity, ClockedEntity, architecture, end_architecture,
                     rising_edge, combinational, sim_process,
                     port_in, port_out, pipeline_in, pipeline_out,
                     clock_generator, ClockGenerator, connect, pipe,
                     ConnectionError, PipelineShapeError, ProcessBlock)
from .interfaces import (Interface, Handler, PrimaryHandler, SecondaryHandler,
                         variable_port_in, variable_port_out, free_view,
                         get_handle, MonomorphKey, TemplateError,
                         TruthinessError)
from .protocols import (AxiStream, AxiStreamSender, AxiStreamReceiver,
                        FifoStream, NativeFifoReadHandler)
from .capture import CaptureError
from .sim import (run, run_cycles, Scheduler, SimulationReport,
                  OscillationError, VcdNamingError)
from .vcd import write_vcd

__all__ = [name for name in dir() if not name.startswith("_")]
