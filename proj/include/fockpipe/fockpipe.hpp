#pragma once

#include "analytic.hpp"
#include "circuit.hpp"
#include "errors.hpp"
#include "fock.hpp"
#include "metrics.hpp"
#include "report.hpp"
#include "scheme.hpp"
#include "validate.hpp"
#include "version.hpp"
