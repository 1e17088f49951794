from app.routers.export import cmd_export_region, cmd_figures
from app.routers.fit import cmd_fit, cmd_plan
from app.routers.predict import cmd_predict
from app.routers.simulate import cmd_simulate


# 메인 그룹에 등록할 명령 (등록 순서 = 도움말 순서)
COMMANDS = [
    cmd_plan,
    cmd_fit,
    cmd_predict,
    cmd_simulate,
    cmd_export_region,
    cmd_figures,
]
