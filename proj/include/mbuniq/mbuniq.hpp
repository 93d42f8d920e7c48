#pragma once

#include "mbuniq/types.hpp"
#include "mbuniq/distribution.hpp"
#include "mbuniq/measures.hpp"
#include "mbuniq/perturbation.hpp"
#include "mbuniq/oracle.hpp"
#include "mbuniq/dataset.hpp"
#include "mbuniq/ci_test.hpp"
#include "mbuniq/decider.hpp"
#include "mbuniq/algorithms.hpp"
#include "mbuniq/datagen.hpp"
#include "mbuniq/harness.hpp"
