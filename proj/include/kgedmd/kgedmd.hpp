#pragma once

#include "cluster.hpp"
#include "config.hpp"
#include "eig.hpp"
#include "errors.hpp"
#include "gram.hpp"
#include "kernels.hpp"
#include "lapack.hpp"
#include "matrix_io.hpp"
#include "operators.hpp"
#include "pipeline.hpp"
#include "rng.hpp"
#include "samples.hpp"
#include "sampling.hpp"
#include "systems.hpp"
