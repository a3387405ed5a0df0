#include <pybind11/pybind11.h>
PYBIND11_MODULE(_joaicl, m) { m.doc() = "joaicl"; }
