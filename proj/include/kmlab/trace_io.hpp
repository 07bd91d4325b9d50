#ifndef KMLAB_TRACE_IO_HPP
#define KMLAB_TRACE_IO_HPP

#include <iosfwd>
#include <string>

#include "kmlab/engine.hpp"

namespace kmlab {

/// Shortest text for a double carrying 17 significant digits; every number
/// in trace, instance and CSV output goes through this, which keeps outputs
/// byte-identical across runs and thread counts.
std::string fmt17(double v);

/// JSON trace file. Numbers are written with 17 significant digits; the key
/// order is fixed, so equal traces serialize to equal bytes.
void write_trace(std::ostream& os, const Trace& trace);
void write_trace_file(const std::string& path, const Trace& trace);

Trace read_trace(std::istream& is);
Trace read_trace_file(const std::string& path);

} // namespace kmlab

#endif
