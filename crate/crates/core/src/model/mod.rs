//! Circuit IR and device model.

mod circuit;
mod device;
mod gate;

pub use circuit::{Circuit, GateRecord, ModelCircuit, PhysicalCircuit};
pub use device::{
    load_device, select_chain, validate_physical_circuit, DeviceModel, EdgeSpec, GateVariant,
    QubitSpec, ReadoutQubitModel, VariantName, Violation, ViolationKind,
};
pub use gate::{Gate, GateKind};
