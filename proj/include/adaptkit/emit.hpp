#ifndef ADAPTKIT_EMIT_HPP
#define ADAPTKIT_EMIT_HPP

#include <string>

#include "adaptkit/gspn.hpp"
#include "adaptkit/transform.hpp"

namespace adaptkit {

/// PNML PT-net document. Element ids carry the internal ids prefixed with
/// p/t/a (bare integers are not valid XML ids). Transition timing lives in a
/// toolspecific block (tool "adapt-kit", version "1") holding the kind and
/// the rate or weight. Throws EmitError when the net fails its structural
/// re-check. Byte-deterministic.
std::string emit_pnml(const Gspn& net);

/// Flat XML interchange document with places, transitions, arcs and trace
/// sections, ordered by id. Throws EmitError when the net is structurally
/// broken or the trace does not cover every place and transition.
/// The document validates against schema/gspn.xsd.
std::string emit_generic_xml(const Gspn& net, const TraceMap& trace);

/// Graph description for rendering: places as circles (initial marking in
/// the label), timed transitions as open boxes, immediate transitions as
/// filled bars, arc weights above 1 as edge labels.
std::string emit_dot(const Gspn& net);

} // namespace adaptkit

#endif
