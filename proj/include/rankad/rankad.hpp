#ifndef RANKAD_RANKAD_HPP
#define RANKAD_RANKAD_HPP

#include "rankad/dataset.hpp"
#include "rankad/detector.hpp"
#include "rankad/error.hpp"
#include "rankad/kernel.hpp"
#include "rankad/knn.hpp"
#include "rankad/metrics.hpp"
#include "rankad/model_io.hpp"
#include "rankad/model_selection.hpp"
#include "rankad/pipeline.hpp"
#include "rankad/rank_svm.hpp"
#include "rankad/synth.hpp"

#endif  // RANKAD_RANKAD_HPP
