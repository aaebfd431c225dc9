from django.urls import path

from .views import ProblemDetailView, ProblemEntailView, ProblemListCreateView, ProblemRunsView
from .views_analysis import (
    ChaseView,
    CountermodelView,
    EvalView,
    NormalizeView,
    RewriteView,
    StickyView,
    TransformView,
)
from .views_tca import GridView, TcaEncodeView, TcaVerifyView

urlpatterns = [
    # Stored problems
    path('problems/', ProblemListCreateView.as_view(), name='problem-list-create'),
    path('problems/<int:pk>/', ProblemDetailView.as_view(), name='problem-detail'),
    path('problems/<int:pk>/entail/', ProblemEntailView.as_view(), name='problem-entail'),
    path('problems/<int:pk>/runs/', ProblemRunsView.as_view(), name='problem-runs'),

    # Analysis
    path('analysis/sticky/', StickyView.as_view(), name='analysis-sticky'),
    path('analysis/normalize/', NormalizeView.as_view(), name='analysis-normalize'),
    path('analysis/chase/', ChaseView.as_view(), name='analysis-chase'),
    path('analysis/rewrite/', RewriteView.as_view(), name='analysis-rewrite'),
    path('analysis/transform/', TransformView.as_view(), name='analysis-transform'),
    path('analysis/eval/', EvalView.as_view(), name='analysis-eval'),
    path('analysis/countermodel/', CountermodelView.as_view(), name='analysis-countermodel'),

    # Two-counter automata
    path('tca/encode/', TcaEncodeView.as_view(), name='tca-encode'),
    path('tca/verify/', TcaVerifyView.as_view(), name='tca-verify'),
    path('tca/grid/', GridView.as_view(), name='tca-grid'),
]
