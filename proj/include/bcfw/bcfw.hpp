#pragma once

#include "bcfw/chain/decode.hpp"
#include "bcfw/chain/metrics.hpp"
#include "bcfw/chain/model.hpp"
#include "bcfw/fw/averaging.hpp"
#include "bcfw/fw/curvature.hpp"
#include "bcfw/fw/gap.hpp"
#include "bcfw/fw/oracles.hpp"
#include "bcfw/fw/solver.hpp"
#include "bcfw/fw/step_rules.hpp"
#include "bcfw/fw/types.hpp"
#include "bcfw/io/dataset.hpp"
#include "bcfw/io/model.hpp"
#include "bcfw/io/synthetic.hpp"
#include "bcfw/io/trace_csv.hpp"
#include "bcfw/svm/constants.hpp"
#include "bcfw/svm/kernel.hpp"
#include "bcfw/svm/objectives.hpp"
#include "bcfw/svm/problem.hpp"
#include "bcfw/svm/train.hpp"
#include "bcfw/svm/types.hpp"
