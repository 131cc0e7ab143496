#include "uosr/outcomes.hpp"

namespace uosr {

OutcomeVector classify_outcomes(const LabelVector& predictions, const LabelVector& labels,
                                std::size_t n_ood) {
    if (predictions.size() != labels.size())
        raise(errc::row_count_mismatch, "predictions " + std::to_string(predictions.size()) +
                                            " vs labels " + std::to_string(labels.size()));
    OutcomeVector o;
    o.outcomes.reserve(labels.size() + n_ood);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        bool correct = predictions[i] == labels[i];
        o.outcomes.push_back(correct ? Outcome::inc : Outcome::inw);
        (correct ? o.n_inc : o.n_inw) += 1;
    }
    o.outcomes.insert(o.outcomes.end(), n_ood, Outcome::ood);
    o.n_ood = n_ood;
    return o;
}

TaskGroundTruth ground_truth(Task task, const OutcomeVector& o) {
    TaskGroundTruth gt;
    gt.task = task;
    gt.reject.resize(o.size(), 0);
    gt.mask.resize(o.size(), 1);
    for (std::size_t i = 0; i < o.size(); ++i) {
        switch (o.outcomes[i]) {
            case Outcome::inc:
                break;
            case Outcome::inw:
                gt.reject[i] = task == Task::osr ? 0 : 1;
                break;
            case Outcome::ood:
                if (task == Task::sp) {
                    gt.mask[i] = 0;
                    gt.reject[i] = 0;
                } else {
                    gt.reject[i] = 1;
                }
                break;
        }
    }
    return gt;
}

double closed_set_accuracy(const OutcomeVector& o) {
    if (o.n_ind() == 0) raise(errc::empty_ind, "no InD samples");
    return static_cast<double>(o.n_inc) / static_cast<double>(o.n_ind());
}

}  // namespace uosr
