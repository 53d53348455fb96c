#pragma once

#include "cepdist/error.hpp"
#include "cepdist/random.hpp"
#include "cepdist/fft.hpp"
#include "cepdist/lti.hpp"
#include "cepdist/spectral.hpp"
#include "cepdist/metrics.hpp"
#include "cepdist/subspace.hpp"
#include "cepdist/phase.hpp"
#include "cepdist/clustering.hpp"
#include "cepdist/config.hpp"
#include "cepdist/verify.hpp"
#include "cepdist/io.hpp"
