#pragma once

// Everything except the command-line driver (qspec/cli.hpp).

#include "qspec/bounded_transform.hpp"
#include "qspec/complex_schur.hpp"
#include "qspec/dense.hpp"
#include "qspec/errors.hpp"
#include "qspec/functional_calculus.hpp"
#include "qspec/io.hpp"
#include "qspec/named_functions.hpp"
#include "qspec/qmatrix.hpp"
#include "qspec/quaternion.hpp"
#include "qspec/random.hpp"
#include "qspec/report.hpp"
#include "qspec/s_spectrum.hpp"
#include "qspec/spectral_core.hpp"
#include "qspec/verify.hpp"
