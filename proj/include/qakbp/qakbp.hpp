#ifndef QAKBP_QAKBP_HPP
#define QAKBP_QAKBP_HPP

#include "qakbp/baseline.hpp"
#include "qakbp/challenge.hpp"
#include "qakbp/ingest.hpp"
#include "qakbp/io.hpp"
#include "qakbp/metrics.hpp"
#include "qakbp/mixer.hpp"
#include "qakbp/model.hpp"
#include "qakbp/pipeline.hpp"
#include "qakbp/random.hpp"
#include "qakbp/templates.hpp"
#include "qakbp/transforms.hpp"
#include "qakbp/unicode.hpp"

#endif  // QAKBP_QAKBP_HPP
