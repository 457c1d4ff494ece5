#pragma once

#include "ilps/error.hpp"
#include "ilps/linalg.hpp"
#include "ilps/ensemble.hpp"
#include "ilps/potentials.hpp"
#include "ilps/noise.hpp"
#include "ilps/dynamics.hpp"
#include "ilps/diagnostics.hpp"
#include "ilps/io.hpp"
