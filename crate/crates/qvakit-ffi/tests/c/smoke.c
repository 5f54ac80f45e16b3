#include <stdio.h>
#include "qvakit.h"

int main(void) {
    QvaGraph *g = NULL;
    size_t v = 0, d = 0, diam = 0;
    if (qva_graph_hamming(3, 5, &g) != QVA_STATUS_OK) return 1;
    if (qva_graph_stats(g, &v, &d, &diam) != QVA_STATUS_OK) return 2;
    qva_graph_free(g);
    double re = 0.0, im = 0.0;
    if (qva_hamming_coefficient(3, 5, 5, 0.1, &re, &im) != QVA_STATUS_INVALID_ARGUMENT) return 3;
    if (qva_last_error_message() == NULL) return 4;
    printf("%zu %zu %zu\n", v, d, diam);
    return 0;
}
