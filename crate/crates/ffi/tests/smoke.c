#include <math.h>
#include <stdio.h>
#include <string.h>

#include "qnlab.h"

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            const char *m = qnlab_last_error_message();                \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,     \
                    m ? m : "no message");                             \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    QnlabContext *ctx = NULL;
    QnlabOperator *op = NULL;
    double slope = 0.0, lo = 0.0, hi = 0.0, norm = 0.0;
    size_t dim = 0;

    CHECK(qnlab_context_new(0, 0.0, 1, &ctx) == QNLAB_OK);
    CHECK(qnlab_operator_from_json("{\"type\":\"jordan_nilpotent\",\"n\":4}", &op) == QNLAB_OK);
    CHECK(qnlab_operator_dim(op, &dim) == QNLAB_OK && dim == 4);
    CHECK(qnlab_estimate_k(ctx, op, "{\"type\":\"basis\",\"index\":2}", 0.5, 0.8, 40, 0.0,
                           &slope, NULL) == QNLAB_OK);
    CHECK(fabs(slope - 0.5) < 1e-3);
    CHECK(qnlab_resolvent_log_norm(ctx, op, 0.5, 0.0, &norm) == QNLAB_OK && norm > 0.0);
    CHECK(qnlab_shift_norm_bounds(1.0, 10.0, &lo, &hi) == QNLAB_OK && lo < hi);

    CHECK(qnlab_operator_from_json("{\"type\":\"nope\"}", NULL) == QNLAB_ERR_NULL);
    QnlabOperator *bad = NULL;
    CHECK(qnlab_operator_from_json("{\"type\":\"nope\"}", &bad) == QNLAB_ERR_INVALID);
    CHECK(bad == NULL && qnlab_last_error_message() != NULL);

    char *report = NULL;
    CHECK(qnlab_run_command("estimate-k", "{\"operator\":{\"type\":\"jordan_nilpotent\",\"n\":2}}",
                            &report) == QNLAB_OK);
    CHECK(strstr(report, "\"schema_version\":1") != NULL);
    qnlab_string_free(report);

    qnlab_operator_free(op);
    qnlab_context_free(ctx);
    printf("ok %s\n", qnlab_version());
    return 0;
}
