from django.contrib import admin

from .models import EntailmentRun, Problem


class EntailmentRunInline(admin.TabularInline):
    model = EntailmentRun
    extra = 0
    readonly_fields = ("verdict", "budget_seconds", "bias", "elapsed_seconds", "created_at")
    fields = readonly_fields


@admin.register(Problem)
class ProblemAdmin(admin.ModelAdmin):
    list_display = ("name", "query", "expected_verdict", "updated_at")
    search_fields = ("name", "query")
    list_filter = ("expected_verdict",)
    inlines = [EntailmentRunInline]


@admin.register(EntailmentRun)
class EntailmentRunAdmin(admin.ModelAdmin):
    list_display = ("problem", "verdict", "budget_seconds", "elapsed_seconds", "created_at")
    list_filter = ("verdict",)
    search_fields = ("problem__name",)
