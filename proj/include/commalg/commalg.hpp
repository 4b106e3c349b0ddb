#pragma once

// Everything at once: domains, matrices, free algebra, canonical forms,
// factorizations, certificates and finite-ring images.
#include "commalg/certificate.hpp"
#include "commalg/imagelab.hpp"
