from flask.cli import FlaskGroup

from app import create_app

cli = FlaskGroup(
    create_app=create_app,
    add_default_commands=False,
    help="Compartilhamento de segredo por limiar sobre problemas da palavra em grupos.",
)

if __name__ == '__main__':
    cli()
